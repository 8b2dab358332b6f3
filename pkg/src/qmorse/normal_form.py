"""Morse normal form at the harmonic base point.

Solves u o phi(f) = f0 for deformations f = f0 + t g of the harmonic
oscillator f0 = p^2 + q^2 = 2 adag a + hbar, order by order in t:

* at order k the residual of g o f + (i/hbar)[f, h] = df/dt splits into a
  diagonal part (a scalar germ of f0, via the falling-product basis
  adag^n a^n = prod_{j<n} (N - j hbar)) and an off-diagonal part, which
  ad(f0) inverts monomial-by-monomial since
  (i/hbar)[f0, adag^m a^n] = 2i(m-n) adag^m a^n;
* the normalizing germ u is transported by du/dt = -(du/dz) g, u(0, z) = z
  (the sign is pinned by the exactly solvable families t q^2 and t q);
* the stored H is the generator of the normalizing automorphism phi in the
  integrate_heisenberg convention, so
  compose_scalar(u, integrate_heisenberg(H, f, N)) == f0 holds literally;
* the spectrum closure is E_n = u^{-1}(t, hbar (2n+1)).

Weight caps are chosen from the perturbation's weight growth per t-order so
that every reported order is exact; the Rayleigh-Schrodinger oracle equality
tests pin this down.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .algebra import bracket_i_hbar, compose_scalar, scalar_to_qseries
from .errors import DomainError
from .field import Coefficient, ONE
from .series import (
    QSeries,
    ScalarSeries,
    SIG_HT,
    SIG_NHT,
    SIG_ZHT,
    harmonic,
    p_op,
    q_op,
    scalar_var,
)


def diagonal_to_scalar(d: QSeries) -> ScalarSeries:
    """Express a diagonal series as a scalar germ s with s o f0 = d.

    Uses adag^n a^n = prod_{j<n} (N - j hbar) with N = (z - hbar)/2 under
    z <-> f0 = 2N + hbar; the conversion is triangular and exact.
    """
    basis = _falling_basis(d.t_cap, d.w2_cap)
    out = ScalarSeries._from_raw({}, SIG_ZHT, d.t_cap, d.w2_cap)
    for (m, n, k, l), c in d._terms.items():
        if m != n:
            raise DomainError("off-diagonal monomial present")
        piece = basis(m).map_coeff(lambda raw: _mul_raw(raw, c))
        out = out + piece.mul_var_power("hbar", k).mul_var_power("t", l)
    return out


def _mul_raw(raw, c):
    from ._kernel import coeff_mul

    return coeff_mul(raw, c)


def _falling_basis(t_cap, w2_cap):
    """Cache of P_n(z, hbar) = prod_{j<n} (z - (2j+1) hbar)/2."""
    cache = [ScalarSeries({(0, 0, 0): 1}, vars=SIG_ZHT, t_cap=t_cap, weight_cap=Fraction(w2_cap, 2))]

    def get(n):
        while len(cache) <= n:
            j = len(cache) - 1
            factor = ScalarSeries(
                {(1, 0, 0): Fraction(1, 2), (0, 1, 0): Fraction(-(2 * j + 1), 2)},
                vars=SIG_ZHT,
                t_cap=t_cap,
                weight_cap=Fraction(w2_cap, 2),
            )
            cache.append(cache[-1] * factor)
        return cache[n]

    return get


def split_homological(r: QSeries, term_order: str = "insertion"):
    """Split r = s o f0 + (i/hbar)[f0, K] with K normalized to zero diagonal.

    The splitting is total at the harmonic base point: ad(f0) is semisimple
    with (i/hbar)[f0, adag^m a^n] = 2i(m-n) adag^m a^n, so each off-diagonal
    monomial divides by 2i(m-n) and the diagonal goes through
    `diagonal_to_scalar`.  `term_order` only permutes the iteration order
    (determinism surrogate; the result is independent of it).
    """
    items = r._terms.items()
    if term_order == "sorted":
        items = sorted(items)
    elif term_order == "reversed":
        items = sorted(items, reverse=True)
    elif term_order != "insertion":
        raise ValueError("term_order must be insertion, sorted, or reversed")
    diag = {}
    off = {}
    for (m, n, k, l), c in items:
        if m == n:
            diag[(m, n, k, l)] = c
        else:
            scale = Coefficient(0, Fraction(-1, 2 * (m - n)))  # 1/(2i(m-n))
            off[(m, n, k, l)] = _mul_raw(scale.raw, c)
    s = diagonal_to_scalar(QSeries._from_raw(diag, r.t_cap, r.w2_cap))
    return s, QSeries._from_raw(off, r.t_cap, r.w2_cap)


def solver_weight_cap(f: QSeries, order: int) -> Fraction:
    """Weight cap under which all orders <= `order` of the solve are exact.

    Perturbation monomials t^l M contribute weight growth (w(M) - 1)/l per
    t-order; the cap follows the fastest rate, with a cushion when the rate
    is below 1/2 (terminating families) so descendants of dropped terms can
    never re-enter the window.
    """
    rate2 = Fraction(0)
    for (m, n, k, l) in f._terms:
        if l >= 1:
            rate2 = max(rate2, Fraction(m + n + 2 * k - 2, l))
    w2 = 2 + math.ceil(rate2 * (order + 1)) + 2
    if rate2 < 1:
        w2 += order
    base2 = max((m + n + 2 * k for (m, n, k, l) in f._terms if l == 0), default=2)
    w2 = max(w2, base2 + 2)
    return Fraction(w2, 2)


class NormalFormResult:
    """Output of the Morse solver.

    The solve is performed on the normalized deformation
    fn = (f - shift)/scale with fn(t=0) = f0; `g`, `H`, `u`, `u_inv` refer to
    fn, while `spectrum` is reported for the original f:
    E_n = scale * u_inv(t, hbar(2n+1)) + shift.

    `H` (the flow generator) is assembled on first access; spectrum-only
    callers never pay for the flow ladders behind it.
    """

    def __init__(self, g, u, u_inv, scale, shift, normalized_input, order, h_slices):
        self.g: ScalarSeries = g
        self.u: ScalarSeries = u
        self.u_inv: ScalarSeries = u_inv
        self.scale: Coefficient = scale
        self.shift: ScalarSeries = shift
        self.normalized_input: QSeries = normalized_input
        self.order: int = order
        self._h_slices = h_slices
        self._H: QSeries | None = None
        self.spectrum: ScalarSeries = spectrum_closure(self)

    @property
    def H(self) -> QSeries:
        """Generator of the normalizing automorphism (integrate_heisenberg convention)."""
        if self._H is None:
            fn = self.normalized_input
            self._H = _eulerian_generator(self._h_slices, self.order, fn.w2_cap)
        return self._H

    def verify(self) -> bool:
        """Master identity: compose_scalar(u, phi(fn)) == f0 through the caps."""
        from .flow import integrate_heisenberg

        fn = self.normalized_input
        transported = integrate_heisenberg(self.H, fn, self.order)
        lhs = compose_scalar(self.u, transported)
        f0 = harmonic(lhs.t_cap, lhs.weight_cap)
        return lhs == f0

    def to_json(self):
        return {
            "format": "normal-form-v1",
            "order": self.order,
            "scale": self.scale.to_json(),
            "shift": self.shift.to_json(),
            "g": self.g.to_json(),
            "H": self.H.to_json(),
            "u": self.u.to_json(),
            "u_inv": self.u_inv.to_json(),
            "spectrum": self.spectrum.to_json(),
        }


def _normalize_input(f: QSeries):
    """Split f(t=0) = scale * f0 + shift(hbar); reject everything else."""
    t0 = f.t_slice(0)
    two_c = t0.coeff((1, 1, 0, 0))
    if not two_c:
        raise DomainError("not a harmonic deformation")
    shift_terms = {}
    for (m, n, k, l), c in t0._terms.items():
        if (m, n) == (1, 1) and k == 0:
            continue
        if (m, n) == (0, 0):
            shift_terms[(k, 0)] = c
            continue
        raise DomainError("not a harmonic deformation")
    scale = two_c / 2
    hbar_coef = Coefficient._raw(shift_terms.get((1, 0), (0, 0, 0, 0, 1)))
    shift_terms[(1, 0)] = (hbar_coef - scale).raw
    shift = ScalarSeries(
        {e: Coefficient._raw(c) for e, c in shift_terms.items()},
        vars=SIG_HT,
        t_cap=f.t_cap,
        weight_cap=f.weight_cap,
    )
    return scale, shift


def quantum_morse(
    f: QSeries,
    order: int,
    *,
    weight_cap=None,
    term_order: str = "insertion",
) -> NormalFormResult:
    """Normalize a deformation of the harmonic oscillator through t-order N.

    f(t=0) must be c (p^2+q^2) plus central hbar terms (use
    `reduce_to_harmonic` or `linear_symplectic` first otherwise).
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    scale, shift = _normalize_input(f)
    if weight_cap is None:
        weight_cap = solver_weight_cap(f, order)
    shift = shift.with_caps(t_cap=order, weight_cap=weight_cap)
    fw = f.with_caps(t_cap=order, weight_cap=weight_cap)
    shift_q = scalar_to_qseries(shift, fw.t_cap, fw.w2_cap)
    fn = (fw - shift_q).scale(scale.inverse())
    w2 = fn.w2_cap

    # order-by-order homological solve: g_k o f0 + (i/hbar)[f0, h_k] = P_k
    dtf = fn.dt()
    S = QSeries._from_raw({}, order, w2)  # sum_j t^j (g_j o fn)
    B = QSeries._from_raw({}, order, w2)  # (i/hbar)[fn, sum_j t^j h_j]
    fpows = [QSeries({(0, 0, 0, 0): ONE}, t_cap=order, weight_cap=weight_cap), fn]
    g_slices = []
    h_slices = []
    for k in range(order):
        residual = (dtf - S - B).t_slice(k)
        g_k, h_k = split_homological(residual, term_order)
        g_slices.append(g_k)
        h_slices.append(h_k)
        if k < order - 1:
            S = S + _compose_cached(g_k, fn, fpows).mul_t_power(k)
            if h_k:
                B = B + bracket_i_hbar(fn, h_k).mul_t_power(k)

    # transport: u' = -(du/dz) g, u(0, z) = z
    z = scalar_var("z", SIG_ZHT, order, weight_cap)
    u_slices = [z]
    for m in range(order):
        acc = z.zero_like()
        for i in range(m + 1):
            j = m - i
            if j < len(g_slices) and g_slices[j]:
                acc = acc + u_slices[i].deriv("z") * g_slices[j]
        u_slices.append(acc.scale(Fraction(-1, m + 1)))
    u = z.zero_like()
    for k, piece in enumerate(u_slices):
        u = u + piece.mul_var_power("t", k)

    g = z.zero_like()
    for k, piece in enumerate(g_slices):
        g = g + piece.mul_var_power("t", k)

    u_inv = invert_series_z(u)
    return NormalFormResult(
        g=g,
        u=u,
        u_inv=u_inv,
        scale=scale,
        shift=shift,
        normalized_input=fn,
        order=order,
        h_slices=h_slices,
    )


def _compose_cached(g_k: ScalarSeries, fn: QSeries, fpows) -> QSeries:
    """g_k o fn using cached powers of fn (g_k is a t-free germ in z, hbar)."""
    out = QSeries._from_raw({}, fn.t_cap, fn.w2_cap)
    for j in range(g_k.var_degree("z") + 1):
        aj = g_k.var_slice("z", j)
        if not aj:
            continue
        while len(fpows) <= j:
            fpows.append(fpows[-1] * fn)
        out = out + scalar_to_qseries(aj, fn.t_cap, fn.w2_cap) * fpows[j]
    return out


def _eulerian_generator(h_slices, order: int, w2: int) -> QSeries:
    """G = -phi(h) where phi is the flow generated (in the fixed frame) by G.

    Bootstrap: G_k needs phi(h_l) only through order k-l, which uses G through
    order k-l-1; each h_l starts its own flow ladder.
    """
    g_slices = []
    flows = []  # flows[l][r] = t-order-r piece of phi(h_l)
    for k in range(order):
        total = h_slices[k]
        for l in range(k):
            ladder = flows[l]
            while len(ladder) <= k - l:
                r = len(ladder) - 1
                acc = None
                for j in range(r + 1):
                    if not ladder[j] or not g_slices[r - j]:
                        continue
                    term = bracket_i_hbar(ladder[j], g_slices[r - j])
                    acc = term if acc is None else acc + term
                if acc is None:
                    acc = QSeries._from_raw({}, order, w2)
                ladder.append(acc.scale(Fraction(1, r + 1)))
            total = total + ladder[k - l]
        g_slices.append(-total)
        flows.append([h_slices[k]])
    H = QSeries._from_raw({}, order, w2)
    for k, gk in enumerate(g_slices):
        H = H + gk.mul_t_power(k)
    return H


def invert_series_z(u: ScalarSeries) -> ScalarSeries:
    """Compositional inverse in z of u = z + O(t), t-adically."""
    if "z" not in u.vars:
        raise DomainError("series has no z variable")
    z = scalar_var("z", u.vars, u.t_cap, u.weight_cap)
    if u.var_slice("t", 0) != z:
        raise DomainError("series is not z + O(t)")
    w = u - z
    v = z
    for _ in range(u.t_cap):
        v = z - w.subs_series("z", v)
    if u.subs_series("z", v) != z:
        raise DomainError("series reversion failed to converge in the t-adic filtration")
    return v


def spectrum_closure(result: NormalFormResult) -> ScalarSeries:
    """E_n(t, hbar) = scale * u_inv(t, hbar(2n+1)) + shift."""
    v = result.u_inv
    out_terms = {}
    from ._kernel import coeff_add, coeff_mul_int

    for (zj, k, l), c in v._terms.items():
        # z^j -> hbar^j (2n+1)^j
        for r in range(zj + 1):
            factor = math.comb(zj, r) * 2**r
            key = (r, k + zj, l)
            val = coeff_mul_int(c, factor)
            acc = out_terms.get(key)
            s = val if acc is None else coeff_add(acc, val)
            if any(s[:4]):
                out_terms[key] = s
            elif acc is not None:
                del out_terms[key]
    e_norm = ScalarSeries._from_raw(out_terms, SIG_NHT, v.t_cap, v.w2_cap)
    e = e_norm.scale(result.scale)
    return e + result.shift.lift(SIG_NHT)


def linear_symplectic(f: QSeries, matrix) -> QSeries:
    """Substitute (q, p) -> (M11 q + M12 p, M21 q + M22 p), det M = 1.

    An algebra automorphism: the substitution preserves [p, q] = -i hbar
    exactly when det M = 1, which is enforced.
    """
    (m11, m12), (m21, m22) = matrix
    m11, m12, m21, m22 = (
        x if isinstance(x, Coefficient) else Coefficient(x)
        for x in (m11, m12, m21, m22)
    )
    if m11 * m22 - m12 * m21 != ONE:
        raise DomainError("matrix is not symplectic (det != 1)")
    qs = q_op(f.t_cap, f.weight_cap)
    ps = p_op(f.t_cap, f.weight_cap)
    q_img = qs.scale(m11) + ps.scale(m12)
    p_img = qs.scale(m21) + ps.scale(m22)
    inv_sqrt2 = Coefficient(0, 0, Fraction(1, 2))
    i_unit = Coefficient(0, 1)
    adag_img = (p_img + q_img.scale(i_unit)).scale(inv_sqrt2)
    a_img = (p_img - q_img.scale(i_unit)).scale(inv_sqrt2)
    ad_pows = [QSeries({(0, 0, 0, 0): ONE}, t_cap=f.t_cap, weight_cap=f.weight_cap)]
    a_pows = [ad_pows[0]]
    out = QSeries._from_raw({}, f.t_cap, f.w2_cap)
    for (m, n, k, l), c in sorted(f._terms.items()):
        while len(ad_pows) <= m:
            ad_pows.append(ad_pows[-1] * adag_img)
        while len(a_pows) <= n:
            a_pows.append(a_pows[-1] * a_img)
        piece = (ad_pows[m] * a_pows[n]).scale(Coefficient._raw(c))
        shifted = {
            (mm, nn, kk + k, ll + l): v
            for (mm, nn, kk, ll), v in piece._terms.items()
            if ll + l <= f.t_cap and mm + nn + 2 * (kk + k) <= f.w2_cap
        }
        out = out + QSeries._from_raw(shifted, f.t_cap, f.w2_cap)
    return out


def reduce_to_harmonic(f0: QSeries, order: int, *, weight_cap=None) -> NormalFormResult:
    """Normalize a t-free Morse operator to the harmonic oscillator.

    Builds the linear interpolation family Q + t (f0 - Q) between f0 and its
    harmonic part Q and runs the Morse solver along it; the t variable of the
    result is the interpolation parameter, with the composite normalization
    read at t = 1.
    """
    if f0.t_degree() > 0:
        raise DomainError("input must be t-free")
    lin = [e for e in f0._terms if e[0] + e[1] == 1 and e[2] == 0]
    if lin:
        raise DomainError("not Morse: nonzero linear part in the symbol")
    a20 = f0.coeff((2, 0, 0, 0))
    a02 = f0.coeff((0, 2, 0, 0))
    a11 = f0.coeff((1, 1, 0, 0))
    if a11 * a11 - 4 * a20 * a02 == Coefficient(0):
        raise DomainError("not Morse: degenerate Hessian of the symbol")
    if a20 or a02:
        raise DomainError(
            "quadratic part is not c(p^2+q^2); precondition with linear_symplectic"
        )
    quad_terms = {
        e: Coefficient._raw(c) for e, c in f0._terms.items() if e[0] == e[1] == 0
    }
    quad_terms[(1, 1, 0, 0)] = a11
    quad = QSeries(quad_terms, t_cap=max(f0.t_cap, order), weight_cap=f0.weight_cap)
    rest = f0.with_caps(t_cap=quad.t_cap) - quad
    family = quad + rest.mul_t_power(1)
    return quantum_morse(family, order, weight_cap=weight_cap)
