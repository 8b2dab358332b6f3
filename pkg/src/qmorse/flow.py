"""Order-by-order integration of Heisenberg equations and propagators.

`integrate_heisenberg` builds the automorphism phi_t generated by H, i.e. the
unique t-power-series solution of d/dt phi(f) = (i/hbar)[phi(f), H] with
phi_0 = id.  A t-dependent observable is transported fiberwise
(phi fixes t), which is what makes phi an algebra automorphism of the whole
t-series ring.  All meromorphic intermediates of the textbook conjugation
U f U^{-1} are avoided; each order is a polynomial identity.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import bracket_i_hbar
from .series import QSeries, one


def _slices(H: QSeries, order: int):
    return [H.t_slice(j) for j in range(order + 1)]


def _flow_orders(x: QSeries, h_slices, n_orders: int):
    """phi_k(x) for k = 0..n_orders via (k+1) phi_{k+1} = sum (i/hbar)[phi_j, H_{k-j}]."""
    phis = [x]
    for k in range(n_orders):
        acc = None
        for j in range(k + 1):
            h = h_slices[k - j]
            if not h or not phis[j]:
                continue
            term = bracket_i_hbar(phis[j], h)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = QSeries._from_raw({}, x.t_cap, x.w2_cap)
        phis.append(acc.scale(Fraction(1, k + 1)))
    return phis


def integrate_heisenberg(H: QSeries, f: QSeries, order: int) -> QSeries:
    """Transport f along the flow of H through t-order `order`."""
    if order < 0:
        raise ValueError("order must be non-negative")
    w2 = min(H.w2_cap, f.w2_cap)
    wc = Fraction(w2, 2)
    fw = f.with_caps(t_cap=order, weight_cap=wc) if f.t_cap != order or f.w2_cap != w2 else f
    hw = H.with_caps(t_cap=order, weight_cap=wc)
    h_slices = _slices(hw, order)
    out = QSeries._from_raw({}, order, w2)
    max_l = fw.t_degree()
    for l in range(max_l + 1):
        fl = fw.t_slice(l)
        if not fl:
            continue
        phis = _flow_orders(fl, h_slices, order - l)
        for k, phi in enumerate(phis):
            out = out + phi.mul_t_power(k + l)
    return out


def solve_propagator(H: QSeries, order: int) -> QSeries:
    """The unique U with dU/dt = H U and U(0) = 1, through t-order `order`."""
    if order < 0:
        raise ValueError("order must be non-negative")
    hw = H.with_caps(t_cap=order)
    h_slices = _slices(hw, order)
    us = [one(order, hw.weight_cap)]
    for k in range(order):
        acc = None
        for j in range(k + 1):
            h = h_slices[k - j]
            if not h or not us[j]:
                continue
            term = h * us[j]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = QSeries._from_raw({}, order, hw.w2_cap)
        us.append(acc.scale(Fraction(1, k + 1)))
    out = QSeries._from_raw({}, order, hw.w2_cap)
    for k, u in enumerate(us):
        out = out + u.mul_t_power(k)
    return out
