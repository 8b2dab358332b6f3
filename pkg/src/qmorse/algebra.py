"""Named operations of the normal-ordered algebra.

Products, commutators, the p/q ordered views, symbols, Borel transform,
hermitian conjugation, the restriction-to-zero map pi, the pairing
P(f, g) = pi(dagger(f) g), and composition of a scalar germ with an operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from . import _kernel
from .errors import DomainError
from .field import Coefficient, I
from .series import (
    QSeries,
    ScalarSeries,
    SIG_HT,
    SIG_PRINCIPAL,
    SIG_SYMBOL,
    p_op,
    q_op,
)

NEG_I = Coefficient(0, -1)
HALF_SQRT2 = Coefficient(0, 0, Fraction(1, 2))          # 1/sqrt2
HALF_I_SQRT2 = Coefficient(0, 0, 0, Fraction(1, 2))     # i/sqrt2


def mul(f: QSeries, g: QSeries) -> QSeries:
    """Normal-ordered product (same as ``f * g``)."""
    return f * g


def commutator(f: QSeries, g: QSeries) -> QSeries:
    return f * g - g * f


def bracket_i_hbar(f: QSeries, g: QSeries) -> QSeries:
    """(i/hbar)[f, g]; the hbar division is exact in normal order.

    Computed with weight headroom +1 so that terms inside the callers' caps
    are exact even though the commutator passes through weight w(f)+w(g)
    before the division brings it back down.
    """
    t_cap = min(f.t_cap, g.t_cap)
    w2 = min(f.w2_cap, g.w2_cap)
    wide = Fraction(w2 + 2, 2)
    fe = f.with_caps(weight_cap=wide)
    ge = g.with_caps(weight_cap=wide)
    out = commutator(fe, ge).div_hbar().scale(I)
    return out.with_caps(t_cap=t_cap, weight_cap=Fraction(w2, 2))


def dagger(f: QSeries) -> QSeries:
    """Hermitian conjugation: swap adag/a powers, conjugate coefficients."""
    out = {}
    for (m, n, k, l), c in f._terms.items():
        a, b, cc, d, den = c
        out[(n, m, k, l)] = (a, -b, cc, -d, den)
    return QSeries._from_raw(out, f.t_cap, f.w2_cap)


def pi_restriction(f: QSeries) -> ScalarSeries:
    """Keep the adag/a-free part as a series in (hbar, t)."""
    terms = {
        (k, l): c for (m, n, k, l), c in f._terms.items() if m == 0 and n == 0
    }
    return ScalarSeries._from_raw(terms, SIG_HT, f.t_cap, f.w2_cap)


def pairing(f: QSeries, g: QSeries) -> ScalarSeries:
    """P(f, g) = pi(dagger(f) g), computed with enough weight headroom."""
    w2 = f.max_weight2() + g.max_weight2()
    t_cap = min(f.t_cap, g.t_cap)
    fx = f.with_caps(t_cap, Fraction(w2, 2))
    gx = g.with_caps(t_cap, Fraction(w2, 2))
    return pi_restriction(dagger(fx) * gx)


def tau(alpha: ScalarSeries) -> ScalarSeries:
    """Coefficient-wise complex conjugation (i -> -i, sqrt2 fixed)."""
    out = {}
    for e, (a, b, c, d, den) in alpha._terms.items():
        out[e] = (a, -b, c, -d, den)
    return ScalarSeries._from_raw(out, alpha.vars, alpha.t_cap, alpha.w2_cap)


def total_symbol(f: QSeries) -> ScalarSeries:
    """Replace adag, a by commuting x, y (exponent-preserving)."""
    return ScalarSeries._from_raw(
        dict(f._terms), SIG_SYMBOL, f.t_cap, f.w2_cap
    )


def principal_symbol(f: QSeries) -> ScalarSeries:
    """Total symbol restricted to hbar = 0, over (x, y, t)."""
    terms = {
        (m, n, l): c for (m, n, k, l), c in f._terms.items() if k == 0
    }
    return ScalarSeries._from_raw(terms, SIG_PRINCIPAL, f.t_cap, f.w2_cap)


def _hbar_index(s: ScalarSeries) -> int:
    if "hbar" not in s.vars:
        raise DomainError("series has no hbar variable")
    return s.vars.index("hbar")


def borel(f):
    """Divide the coefficient of hbar^k by k! (QSeries or ScalarSeries)."""
    if isinstance(f, QSeries):
        out = {
            e: _kernel.coeff_mul(c, _inv_fact(e[2]))
            for e, c in f._terms.items()
        }
        return QSeries._from_raw(out, f.t_cap, f.w2_cap)
    idx = _hbar_index(f)
    out = {
        e: _kernel.coeff_mul(c, _inv_fact(e[idx])) for e, c in f._terms.items()
    }
    return ScalarSeries._from_raw(out, f.vars, f.t_cap, f.w2_cap)


def borel_inverse(f):
    """Multiply the coefficient of hbar^k by k!."""
    if isinstance(f, QSeries):
        out = {
            e: _kernel.coeff_mul_int(c, factorial(e[2]))
            for e, c in f._terms.items()
        }
        return QSeries._from_raw(out, f.t_cap, f.w2_cap)
    idx = _hbar_index(f)
    out = {
        e: _kernel.coeff_mul_int(c, factorial(e[idx]))
        for e, c in f._terms.items()
    }
    return ScalarSeries._from_raw(out, f.vars, f.t_cap, f.w2_cap)


def hbar_convolve(u: ScalarSeries, v: ScalarSeries) -> ScalarSeries:
    """Product on the Borel side: B(uv) = B(u) * B(v) for this convolution."""
    u._check_sig(v)
    idx = _hbar_index(u)
    out = {}
    for e1, c1 in u._terms.items():
        for e2, c2 in v._terms.items():
            exp = tuple(a + b for a, b in zip(e1, e2))
            i, j = e1[idx], e2[idx]
            w = Fraction(factorial(i) * factorial(j), factorial(i + j))
            c = _kernel.coeff_mul(
                _kernel.coeff_mul(c1, c2),
                _kernel.coeff_make(w.numerator, 0, 0, 0, w.denominator),
            )
            acc = out.get(exp)
            s = c if acc is None else _kernel.coeff_add(acc, c)
            if any(s[:4]):
                out[exp] = s
            elif acc is not None:
                del out[exp]
    result = ScalarSeries._from_raw(
        out, u.vars, min(u.t_cap, v.t_cap), min(u.w2_cap, v.w2_cap)
    )
    return result._truncated()


def _inv_fact(k):
    f = factorial(k)
    return _kernel.coeff_make(1, 0, 0, 0, f)


def scalar_to_qseries(s: ScalarSeries, t_cap, w2_cap) -> QSeries:
    """Embed a central scalar series (variables within {z?, hbar, t}, z dead)."""
    ih = s.vars.index("hbar") if "hbar" in s.vars else None
    it = s.vars.index("t") if "t" in s.vars else None
    out = {}
    for e, c in s._terms.items():
        for pos, exp in enumerate(e):
            if exp and pos not in (ih, it):
                raise ValueError(f"variable {s.vars[pos]!r} is not central")
        k = e[ih] if ih is not None else 0
        l = e[it] if it is not None else 0
        if l <= t_cap and 2 * k <= w2_cap:
            out[(0, 0, k, l)] = c
    return QSeries._from_raw(out, t_cap, w2_cap)


def compose_scalar(u: ScalarSeries, f: QSeries) -> QSeries:
    """u o f = sum_j u_j f^j for a scalar germ u(z, hbar, t).

    Requires every monomial of f to carry weight >= 1/2 or a positive
    t power, so each output coefficient is a finite sum.
    """
    if "z" not in u.vars:
        raise DomainError("composition germ must be a series in z")
    if (0, 0, 0, 0) in f._terms:
        raise DomainError("composition not t-adically/weight-adically finite")
    t_cap = min(u.t_cap, f.t_cap)
    w2 = min(u.w2_cap, f.w2_cap)
    out = QSeries._from_raw({}, t_cap, w2)
    for j in range(u.var_degree("z"), -1, -1):
        aj = u.var_slice("z", j)
        out = out * f + scalar_to_qseries(aj, t_cap, w2)
    return out


# -- q-before-p / p-before-q ordered views --------------------------------------


@dataclass
class OrderedPQ:
    """Secondary view of a QSeries in an ordered q/p basis.

    ``order`` is "qp" (exponents mean q^e1 p^e2) or "pq" (p^e1 q^e2); keys are
    (e1, e2, hbar, t).  Storage stays normal-ordered; this view exists for the
    differential calculus and for display.
    """

    order: str
    terms: dict
    t_cap: int
    w2_cap: int

    def coeff(self, exp) -> Coefficient:
        raw = self.terms.get(tuple(exp))
        return Coefficient._raw(raw) if raw else Coefficient(0)

    def __str__(self):
        names = ("q", "p") if self.order == "qp" else ("p", "q")
        if not self.terms:
            return "0"
        chunks = []
        for exp in sorted(self.terms):
            c = Coefficient._raw(self.terms[exp])
            factors = [
                nm if e == 1 else f"{nm}^{e}"
                for nm, e in zip(names + ("hbar", "t"), exp)
                if e
            ]
            body = "*".join(factors)
            cs = str(c)
            if body:
                cs = body if cs == "1" else (f"-{body}" if cs == "-1" else f"({cs})*{body}")
            chunks.append(cs)
        return " + ".join(chunks)


def _cpoly_mul(A, B):
    out = {}
    for e1, c1 in A.items():
        for e2, c2 in B.items():
            exp = (e1[0] + e2[0], e1[1] + e2[1])
            c = _kernel.coeff_mul(c1, c2)
            acc = out.get(exp)
            s = c if acc is None else _kernel.coeff_add(acc, c)
            if any(s[:4]):
                out[exp] = s
            elif acc is not None:
                del out[exp]
    return out


def _cpoly_pow(base, n, cache):
    while len(cache) <= n:
        cache.append(_cpoly_mul(cache[-1], base))
    return cache[n]


def ordered_monomial(e1: int, e2: int, order: str, t_cap, w2_cap) -> QSeries:
    """Normal-ordered image of q^e1 p^e2 (or p^e1 q^e2 for order="pq")."""
    wc = Fraction(w2_cap, 2)
    qs = q_op(t_cap, wc)
    ps = p_op(t_cap, wc)
    first, second = (qs, ps) if order == "qp" else (ps, qs)
    return first**e1 * second**e2


def to_ordered(f: QSeries, order: str) -> OrderedPQ:
    """Rewrite into the q-before-p (or p-before-q) ordered basis.

    Triangular in the hbar filtration: the hbar^k slice is matched at the
    symbol level by a commutative change of variables, the normal-ordered
    reconstruction is subtracted, and the remainder starts at hbar^(k+1).
    """
    if order not in ("qp", "pq"):
        raise ValueError("order must be 'qp' or 'pq'")
    # commutative images of x (adag) and y (a) in (Q, P) variables
    x_img = {(1, 0): HALF_I_SQRT2.raw, (0, 1): HALF_SQRT2.raw}       # (P + iQ)/sqrt2
    y_img = {(1, 0): _kernel.coeff_neg(HALF_I_SQRT2.raw), (0, 1): HALF_SQRT2.raw}
    x_cache = [{(0, 0): _kernel.COEFF_ONE}]
    y_cache = [{(0, 0): _kernel.COEFF_ONE}]

    rem = f
    collected = {}
    mono_cache = {}
    while rem:
        kmin = min(k for (_, _, k, _) in rem._terms)
        batch = {}
        for (m, n, k, l), c in rem._terms.items():
            if k != kmin:
                continue
            expansion = _cpoly_mul(
                _cpoly_pow(x_img, m, x_cache), _cpoly_pow(y_img, n, y_cache)
            )
            for (eq, ep), w in expansion.items():
                key = (eq, ep, l) if order == "qp" else (ep, eq, l)
                v = _kernel.coeff_mul(c, w)
                acc = batch.get(key)
                s = v if acc is None else _kernel.coeff_add(acc, v)
                if any(s[:4]):
                    batch[key] = s
                elif acc is not None:
                    del batch[key]
        sub = QSeries._from_raw({}, rem.t_cap, rem.w2_cap)
        for (e1, e2, l), c in batch.items():
            collected[(e1, e2, kmin, l)] = c
            if (e1, e2) not in mono_cache:
                mono_cache[(e1, e2)] = ordered_monomial(
                    e1, e2, order, rem.t_cap, rem.w2_cap
                )
            piece = mono_cache[(e1, e2)].scale(Coefficient._raw(c))
            shifted = {
                (m, n, k + kmin, tl + l): v
                for (m, n, k, tl), v in piece._terms.items()
                if tl + l <= rem.t_cap and m + n + 2 * (k + kmin) <= rem.w2_cap
            }
            sub = sub + QSeries._from_raw(shifted, rem.t_cap, rem.w2_cap)
        new_rem = rem - sub
        if new_rem and min(k for (_, _, k, _) in new_rem._terms) <= kmin:
            raise AssertionError("ordered rewrite failed to make progress")
        rem = new_rem
    return OrderedPQ(order, collected, f.t_cap, f.w2_cap)


def from_ordered(view: OrderedPQ) -> QSeries:
    """Normal-order an ordered q/p form back into the algebra."""
    out = QSeries._from_raw({}, view.t_cap, view.w2_cap)
    mono_cache = {}
    for (e1, e2, k, l), c in view.terms.items():
        if (e1, e2) not in mono_cache:
            mono_cache[(e1, e2)] = ordered_monomial(
                e1, e2, view.order, view.t_cap, view.w2_cap
            )
        piece = mono_cache[(e1, e2)].scale(Coefficient._raw(c))
        shifted = {
            (m, n, kk + k, tl + l): v
            for (m, n, kk, tl), v in piece._terms.items()
            if tl + l <= view.t_cap and m + n + 2 * (kk + k) <= view.w2_cap
        }
        out = out + QSeries._from_raw(shifted, view.t_cap, view.w2_cap)
    return out


def to_pq(f: QSeries) -> OrderedPQ:
    """The q-before-p ordered expansion of f."""
    return to_ordered(f, "qp")


def from_pq(view_or_terms, t_cap=None, weight_cap=None) -> QSeries:
    """Build a QSeries from a q-before-p ordered form.

    Accepts an OrderedPQ or a plain dict {(mq, np, k, l): coefficient} with
    explicit caps.
    """
    if isinstance(view_or_terms, OrderedPQ):
        return from_ordered(view_or_terms)
    if t_cap is None or weight_cap is None:
        raise ValueError("caps required for a raw ordered term map")
    from .series import weight_cap_to_w2

    terms = {
        tuple(exp): (c.raw if isinstance(c, Coefficient) else Coefficient(c).raw)
        for exp, c in view_or_terms.items()
    }
    view = OrderedPQ("qp", terms, int(t_cap), weight_cap_to_w2(weight_cap))
    return from_ordered(view)
