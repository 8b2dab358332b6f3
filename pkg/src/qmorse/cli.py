"""Command-line entry point: parse expressions, dispatch, print JSON.

Exit codes: 0 success, 2 expression parse error, 3 domain error, 4
resource/cap overflow.  Results go to stdout as JSON; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import algebra, flow, gevrey, milnor, normal_form, spectrum
from .errors import DomainError, ParseError, ResourceError
from .field import Coefficient
from .milnor import PlanePoly
from .parser import elaborate, elaborate_plane, parse_expr
from .series import QSeries, ScalarSeries, harmonic, t_op

DEFAULT_T_CAP = 16
DEFAULT_WEIGHT_CAP = "16"


def _caps_args(sub):
    sub.add_argument("--t-cap", type=int, default=DEFAULT_T_CAP)
    sub.add_argument("--weight-cap", default=DEFAULT_WEIGHT_CAP)


def _expr(text, t_cap, weight_cap) -> QSeries:
    return elaborate(parse_expr(text), t_cap, weight_cap)


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _float_terms(series: ScalarSeries):
    out = []
    for exp in sorted(series._terms):
        c = series.coeff(exp)
        z = c.to_complex()
        out.append({"exp": list(exp), "re": z.real, "im": z.imag})
    return out


def _rescale_t(series: ScalarSeries) -> ScalarSeries:
    """Bookkeeping substitution t -> hbar t in a scalar series."""
    wide = series.with_caps(weight_cap=Fraction(series.w2_cap + 2 * series.t_cap, 2))
    ti = wide.vars.index("t")
    hi = wide.vars.index("hbar")
    terms = {}
    for exp, c in wide._terms.items():
        new = list(exp)
        new[hi] += exp[ti]
        terms[tuple(new)] = c
    out = ScalarSeries._from_raw({}, wide.vars, wide.t_cap, wide.w2_cap)
    out._terms = {e: c for e, c in terms.items() if not out._over_cap(e)}
    return out


def _perturbed(args) -> QSeries:
    """f = p^2 + q^2 + t * g from the --perturbation expression."""
    order = getattr(args, "order", None)
    t_cap = max(order if order is not None else 0, DEFAULT_T_CAP)
    g = elaborate(parse_expr(args.perturbation), t_cap, "64")
    f0 = harmonic(t_cap, "64")
    f = f0 + t_op(t_cap, "64") * g
    return f


def cmd_binary(args):
    f = _expr(args.expr[0], args.t_cap, args.weight_cap)
    if args.command == "dagger":
        _emit(algebra.dagger(f).to_json())
        return 0
    if args.command == "borel":
        out = algebra.borel_inverse(f) if args.inverse else algebra.borel(f)
        _emit(out.to_json())
        return 0
    if args.command == "symbol":
        out = algebra.principal_symbol(f) if args.principal else algebra.total_symbol(f)
        _emit(out.to_json())
        return 0
    g = _expr(args.expr[1], args.t_cap, args.weight_cap)
    out = f * g if args.command == "mul" else algebra.commutator(f, g)
    _emit(out.to_json())
    return 0


def cmd_flow(args):
    h = _expr(args.hamiltonian, max(args.order, DEFAULT_T_CAP), args.weight_cap)
    f = _expr(args.observable, max(args.order, DEFAULT_T_CAP), args.weight_cap)
    _emit(flow.integrate_heisenberg(h, f, args.order).to_json())
    return 0


def cmd_normal_form(args):
    f = _perturbed(args)
    result = normal_form.quantum_morse(
        f, args.order, weight_cap=_opt_weight(args.weight_cap)
    )
    payload = result.to_json()
    if args.rescale_t:
        payload["spectrum"] = _rescale_t(result.spectrum).to_json()
        payload["rescaled_t"] = True
    _emit(payload)
    return 0


def cmd_spectrum(args):
    f = _perturbed(args)
    result = normal_form.quantum_morse(
        f, args.order, weight_cap=_opt_weight(args.weight_cap)
    )
    spec = result.spectrum
    if args.level is not None:
        spec = spec.eval_var("n", Coefficient(args.level))
    if args.rescale_t:
        spec = _rescale_t(spec)
    _emit(
        {
            "format": "spectrum-v1",
            "level": args.level,
            "rescaled_t": bool(args.rescale_t),
            "series": spec.to_json(),
            "terms_float": _float_terms(spec),
        }
    )
    return 0


def cmd_rs(args):
    f = _perturbed(args)
    series = spectrum.rs_perturbation(f, args.level, args.order)
    _emit(
        {
            "format": "spectrum-v1",
            "level": args.level,
            "series": series.to_json(),
            "terms_float": _float_terms(series),
        }
    )
    return 0


def cmd_diag(args):
    f = _perturbed(args)
    if args.csv:
        op = spectrum.fock_matrix(f, args.dim, args.t, args.hbar)
        sys.stdout.write(op.to_csv())
        return 0
    result = spectrum.diagonalize(f, args.t, args.hbar, args.dim, args.levels)
    if not result.hermitian:
        sys.stderr.write("warning: operator is not hermitian at these parameters\n")
    values = [
        v if isinstance(v, float) else {"re": v.real, "im": v.imag}
        for v in result.values
    ]
    _emit(
        {
            "format": "diag-v1",
            "dim": result.dim,
            "t": args.t,
            "hbar": args.hbar,
            "values": values,
            "converged": result.converged,
            "hermitian": result.hermitian,
        }
    )
    return 0


def cmd_gevrey(args):
    if args.coeffs:
        with open(args.coeffs, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        coeffs = [Fraction(str(x)) if isinstance(x, str) else float(x) for x in data]
        source = args.coeffs
    else:
        if not args.from_spectrum:
            raise DomainError("provide either --from-spectrum EXPR or --coeffs FILE")
        args.perturbation = args.from_spectrum
        f = _perturbed(args)
        result = normal_form.quantum_morse(f, args.order)
        g = elaborate(parse_expr(args.from_spectrum), 1, "64")
        if args.hbar_weight is not None:
            w = Fraction(args.hbar_weight)
        else:
            w = Fraction(g.max_weight2() - 2, 2)
        coeffs = gevrey.extract_diagonal(result.spectrum, args.level, w)
        source = f"spectrum({args.from_spectrum}), level {args.level}"
    window = None
    if args.window:
        k1, _, k2 = args.window.partition(":")
        window = (int(k1), int(k2))
    report = gevrey.gevrey_report(coeffs, window, source=source)
    _emit(report.to_json())
    return 0


def cmd_trace(args):
    f = _expr(args.expr[0], args.t_cap, args.weight_cap)
    series = spectrum.trace_hbar(f, args.levels)
    _emit(
        {
            "format": "trace-v1",
            "levels": args.levels,
            "series": series.to_json(),
            "terms_float": _float_terms(series),
        }
    )
    return 0


def _plane_family(args):
    params = [s for s in (args.params.split(",") if args.params else []) if s]
    family = elaborate_plane(parse_expr(args.symbol), params)
    base = {}
    tangents = [dict() for _ in params]
    for exp, c in family.items():
        lam = exp[2:]
        total = sum(lam)
        if total == 0:
            base[exp[:2]] = c
        elif total == 1:
            j = lam.index(1)
            tangents[j][exp[:2]] = c
        else:
            raise DomainError("family must be linear in the parameters")
    return PlanePoly(base), [PlanePoly(t) for t in tangents]


def cmd_milnor(args):
    args.params = None
    poly, _ = _plane_family(args)
    dim, stabilized = milnor.milnor_number(poly, args.cutoff)
    _emit(
        {
            "format": "milnor-v1",
            "dim": dim,
            "stabilized": stabilized,
            "cutoff": args.cutoff,
        }
    )
    return 0


def cmd_versal(args):
    poly, tangents = _plane_family(args)
    dim, basis, stabilized = milnor.versality_dimension(poly, args.cutoff)
    versal, _ = milnor.check_versal(poly, tangents, args.cutoff)
    _emit(
        {
            "format": "versal-v1",
            "dim": dim,
            "basis": ["*".join(filter(None, [
                f"x^{ex}" if ex > 1 else ("x" if ex else ""),
                f"y^{ey}" if ey > 1 else ("y" if ey else ""),
            ])) or "1" for ex, ey in basis],
            "versal": versal,
            "stabilized": stabilized,
            "cutoff": args.cutoff,
        }
    )
    return 0


def _opt_weight(value):
    return None if value in (None, "auto") else value


def build_parser():
    ap = argparse.ArgumentParser(
        prog="qmorse",
        description="Exact normal-ordered algebra and Morse normal forms for perturbed oscillators",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    for name, nargs in (("mul", 2), ("commutator", 2), ("dagger", 1), ("borel", 1), ("symbol", 1)):
        s = sub.add_parser(name)
        s.add_argument("expr", nargs=nargs)
        _caps_args(s)
        if name == "borel":
            s.add_argument("--inverse", action="store_true")
        if name == "symbol":
            s.add_argument("--principal", action="store_true")
        s.set_defaults(fn=cmd_binary)

    s = sub.add_parser("flow")
    s.add_argument("--hamiltonian", required=True)
    s.add_argument("--observable", required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--weight-cap", default=DEFAULT_WEIGHT_CAP)
    s.set_defaults(fn=cmd_flow)

    s = sub.add_parser("normal-form")
    s.add_argument("--perturbation", required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--rescale-t", action="store_true")
    s.add_argument("--weight-cap", default="auto")
    s.set_defaults(fn=cmd_normal_form)

    s = sub.add_parser("spectrum")
    s.add_argument("--perturbation", required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--level", type=int, default=None)
    s.add_argument("--rescale-t", action="store_true")
    s.add_argument("--weight-cap", default="auto")
    s.set_defaults(fn=cmd_spectrum)

    s = sub.add_parser("rs")
    s.add_argument("--perturbation", required=True)
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--order", type=int, required=True)
    s.set_defaults(fn=cmd_rs)

    s = sub.add_parser("diag")
    s.add_argument("--perturbation", required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--hbar", type=float, required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--levels", type=int, default=1)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(fn=cmd_diag)

    s = sub.add_parser("gevrey")
    s.add_argument("--from-spectrum", default=None, metavar="EXPR")
    s.add_argument("--coeffs", default=None, metavar="FILE")
    s.add_argument("--level", type=int, default=0)
    s.add_argument("--order", type=int, default=16)
    s.add_argument("--hbar-weight", default=None)
    s.add_argument("--window", default=None, metavar="K1:K2")
    s.set_defaults(fn=cmd_gevrey)

    s = sub.add_parser("trace")
    s.add_argument("expr", nargs=1)
    s.add_argument("--levels", type=int, required=True)
    _caps_args(s)
    s.set_defaults(fn=cmd_trace)

    s = sub.add_parser("milnor")
    s.add_argument("--symbol", required=True)
    s.add_argument("--cutoff", type=int, required=True)
    s.set_defaults(fn=cmd_milnor)

    s = sub.add_parser("versal")
    s.add_argument("--symbol", required=True)
    s.add_argument("--params", default=None)
    s.add_argument("--cutoff", type=int, required=True)
    s.set_defaults(fn=cmd_versal)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return 2
    except DomainError as exc:
        sys.stderr.write(f"domain error: {exc}\n")
        return 3
    except ResourceError as exc:
        sys.stderr.write(f"resource error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
