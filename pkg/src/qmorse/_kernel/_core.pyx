# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernel: same semantics as _core_py, compiled hot loops.

Coefficients stay arbitrary-precision Python ints (exactness is the point);
Cython removes the interpreter overhead of the pair loop, the reordering sum,
and the tuple packing, which is where the engine spends its time.
"""

from math import comb as _comb, factorial as _factorial, gcd as _gcd

BACKEND = "cython"

COEFF_ZERO = (0, 0, 0, 0, 1)
COEFF_ONE = (1, 0, 0, 0, 1)


cpdef tuple coeff_make(a, b, c, d, den):
    if den == 1:
        return (a, b, c, d, 1)
    if den == 0:
        raise ZeroDivisionError("coefficient with zero denominator")
    if den < 0:
        a, b, c, d, den = -a, -b, -c, -d, -den
    # incremental gcd with early exit: most reductions terminate at 1 quickly
    g = _gcd(den, abs(a))
    if g > 1:
        g = _gcd(g, abs(b))
    if g > 1:
        g = _gcd(g, abs(c))
    if g > 1:
        g = _gcd(g, abs(d))
    if g > 1:
        a //= g
        b //= g
        c //= g
        d //= g
        den //= g
    return (a, b, c, d, den)


cpdef tuple coeff_add(tuple x, tuple y):
    xa, xb, xc, xd, xq = x
    ya, yb, yc, yd, yq = y
    if xq == yq:
        if xq == 1:
            return (xa + ya, xb + yb, xc + yc, xd + yd, 1)
        return coeff_make(xa + ya, xb + yb, xc + yc, xd + yd, xq)
    return coeff_make(
        xa * yq + ya * xq,
        xb * yq + yb * xq,
        xc * yq + yc * xq,
        xd * yq + yd * xq,
        xq * yq,
    )


cpdef tuple coeff_neg(tuple x):
    return (-x[0], -x[1], -x[2], -x[3], x[4])


cpdef tuple coeff_sub(tuple x, tuple y):
    return coeff_add(x, coeff_neg(y))


cpdef tuple coeff_mul(tuple x, tuple y):
    xa, xb, xc, xd, xq = x
    ya, yb, yc, yd, yq = y
    if xq == 1 and yq == 1:
        return (
            xa * ya - xb * yb + 2 * xc * yc - 2 * xd * yd,
            xa * yb + xb * ya + 2 * xc * yd + 2 * xd * yc,
            xa * yc + xc * ya - xb * yd - xd * yb,
            xa * yd + xd * ya + xb * yc + xc * yb,
            1,
        )
    return coeff_make(
        xa * ya - xb * yb + 2 * xc * yc - 2 * xd * yd,
        xa * yb + xb * ya + 2 * xc * yd + 2 * xd * yc,
        xa * yc + xc * ya - xb * yd - xd * yb,
        xa * yd + xd * ya + xb * yc + xc * yb,
        xq * yq,
    )


cpdef tuple coeff_mul_int(tuple x, n):
    if x[4] == 1:
        return (x[0] * n, x[1] * n, x[2] * n, x[3] * n, 1)
    return coeff_make(x[0] * n, x[1] * n, x[2] * n, x[3] * n, x[4])


def qmul(dict A, dict B, long t_cap, long w2_cap, long guard):
    """Normal-ordered product of two term maps (see the pure kernel docs)."""
    cdef dict out = {}
    cdef long m1, n1, k1, l1, m2, n2, k2, l2, l, m, n, k, j, jmax
    cdef tuple key, c, term, acc
    for exp1, c1 in A.items():
        m1 = exp1[0]
        n1 = exp1[1]
        k1 = exp1[2]
        l1 = exp1[3]
        for exp2, c2 in B.items():
            l2 = exp2[3]
            l = l1 + l2
            if l > t_cap:
                continue
            m2 = exp2[0]
            n2 = exp2[1]
            k2 = exp2[2]
            if m1 + n1 + m2 + n2 + 2 * (k1 + k2) > w2_cap:
                continue
            c = coeff_mul(c1, c2)
            m = m1 + m2
            n = n1 + n2
            k = k1 + k2
            jmax = n1 if n1 < m2 else m2
            for j in range(jmax + 1):
                if j:
                    term = coeff_mul_int(c, _comb(n1, j) * _comb(m2, j) * _factorial(j))
                else:
                    term = c
                key = (m - j, n - j, k + j, l)
                acc = out.get(key)
                out[key] = term if acc is None else coeff_add(acc, term)
        if len(out) > guard:
            raise MemoryError("term-count guard exceeded")
    return {
        key: val
        for key, val in out.items()
        if val[0] or val[1] or val[2] or val[3]
    }
