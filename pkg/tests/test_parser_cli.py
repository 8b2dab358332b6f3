"""Expression grammar, elaboration, CLI wiring, exit codes, round trips."""

import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from qmorse.errors import DomainError, ParseError
from qmorse.field import Coefficient, I
from qmorse.parser import elaborate, elaborate_plane, parse_expr, tokenize
from qmorse.series import QSeries, harmonic, hbar_op, q_op

CAPS = (4, "12")


def _elab(text):
    return elaborate(parse_expr(text), *CAPS)


def test_grammar_examples():
    assert _elab("p^2+q^2") == harmonic(*CAPS)
    f = _elab("(i/2)*hbar*ad*a")
    assert f.coeff((1, 1, 1, 0)) == I * __import__("fractions").Fraction(1, 2)
    assert _elab("p*q-q*p") == hbar_op(*CAPS).scale(-I)
    assert _elab("ad*a") == QSeries({(1, 1, 0, 0): 1}, t_cap=4, weight_cap="12")
    assert _elab("q^4") == q_op(*CAPS) ** 4
    assert _elab("3/4") == QSeries({(0, 0, 0, 0): __import__("fractions").Fraction(3, 4)}, t_cap=4, weight_cap="12")
    assert _elab("-q") == -q_op(*CAPS)
    assert _elab("2^3") == QSeries({(0, 0, 0, 0): 8}, t_cap=4, weight_cap="12")


def test_implicit_multiplication_rejected():
    for text in ("q p", "2 q", "(q)(p)", "q(p)", "2 3"):
        with pytest.raises(ParseError) as err:
            parse_expr(text)
        assert "implicit multiplication" in str(err.value)


def test_parse_errors_carry_offsets():
    with pytest.raises(ParseError) as err:
        parse_expr("q + ")
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse_expr("q ^ p")
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse_expr("q + $")
    assert err.value.offset == 4
    with pytest.raises(ParseError) as err:
        parse_expr("q ^ 1/2")  # fractional power
    assert err.value.expected == ("uint",)


def test_power_must_be_literal():
    with pytest.raises(ParseError):
        parse_expr("q^(2)")
    with pytest.raises(ParseError):
        parse_expr("q^-1")


def test_unknown_symbol_is_domain_error():
    with pytest.raises(DomainError):
        _elab("zz + 1")


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=40))
def test_parser_never_crashes(text):
    try:
        parse_expr(text)
    except ParseError:
        pass


@settings(max_examples=120, deadline=None)
@given(st.binary(max_size=30))
def test_parser_survives_arbitrary_bytes(data):
    try:
        parse_expr(data.decode("utf-8", errors="replace"))
    except ParseError:
        pass


def test_elaborate_plane():
    fam = elaborate_plane(parse_expr("p^2+q^3+l1*q"), params=("l1",))
    assert fam[(0, 2, 0)] == Coefficient(1)
    assert fam[(3, 0, 0)] == Coefficient(1)
    assert fam[(1, 0, 1)] == Coefficient(1)
    with pytest.raises(DomainError):
        elaborate_plane(parse_expr("ad*a"), params=())


def _run_cli(*argv, expect=0):
    proc = subprocess.run(
        [sys.executable, "-m", "qmorse.cli", *argv],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == expect, proc.stderr
    return proc


def test_cli_mul_round_trip():
    proc = _run_cli("mul", "q", "p", "--t-cap", "2", "--weight-cap", "4")
    payload = json.loads(proc.stdout)
    assert payload["format"] == "qseries-v1"
    assert QSeries.from_json(payload) == q_op(2, 4) * p_op_like()


def p_op_like():
    from qmorse.series import p_op

    return p_op(2, 4)


def test_cli_commutator():
    proc = _run_cli("commutator", "p", "q")
    payload = json.loads(proc.stdout)
    f = QSeries.from_json(payload)
    assert f == hbar_op(16, "16").scale(-I)


def test_cli_exit_codes():
    _run_cli("mul", "q p", "p", expect=2)
    _run_cli("normal-form", "--perturbation", "zz", "--order", "2", expect=3)
    _run_cli("milnor", "--symbol", "q^2+1", "--cutoff", "4", expect=3)


def test_cli_spectrum_and_rs_agree():
    a = _run_cli("spectrum", "--perturbation", "q^4", "--order", "3", "--level", "1")
    b = _run_cli("rs", "--perturbation", "q^4", "--level", "1", "--order", "3")
    sa = json.loads(a.stdout)["series"]["terms"]
    sb = json.loads(b.stdout)["series"]["terms"]
    da = {tuple(t["exp"][1:]): t["coef"] for t in sa}  # drop dead n slot
    db = {tuple(t["exp"]): t["coef"] for t in sb}
    assert da == db


def test_cli_normal_form_deterministic_bytes():
    a = _run_cli("normal-form", "--perturbation", "q^3", "--order", "4")
    b = _run_cli("normal-form", "--perturbation", "q^3", "--order", "4")
    assert a.stdout == b.stdout
    payload = json.loads(a.stdout)
    assert payload["format"] == "normal-form-v1"
    for key in ("g", "H", "u", "u_inv", "spectrum"):
        assert payload[key]["format"] == "qseries-v1"


def test_cli_rescale_t():
    plain = json.loads(
        _run_cli("spectrum", "--perturbation", "q^2", "--order", "2").stdout
    )
    rescaled = json.loads(
        _run_cli(
            "spectrum", "--perturbation", "q^2", "--order", "2", "--rescale-t"
        ).stdout
    )
    def exps(payload):
        return sorted(tuple(t["exp"]) for t in payload["series"]["terms"])
    # t -> hbar t shifts the hbar exponent by the t order
    shifted = sorted((n, h + l, l) for (n, h, l) in exps(plain))
    assert exps(rescaled) == shifted


def test_cli_diag_and_gevrey_and_versal():
    d = json.loads(
        _run_cli(
            "diag", "--perturbation", "q^4", "--t", "0.0", "--hbar", "1.0",
            "--dim", "30", "--levels", "3",
        ).stdout
    )
    assert d["hermitian"] and d["converged"]
    assert abs(d["values"][0] - 1.0) < 1e-12

    g = json.loads(
        _run_cli(
            "gevrey", "--from-spectrum", "q^4", "--level", "0", "--order", "10",
            "--window", "4:9",
        ).stdout
    )
    assert g["format"] == "borel-report-v1"
    assert g["alphas_exact"][2] == "-21/16"

    v = json.loads(
        _run_cli(
            "versal", "--symbol", "p^2+q^4+l1*q+l2*q^2", "--params", "l1,l2",
            "--cutoff", "8",
        ).stdout
    )
    assert v["versal"] and v["stabilized"] and v["dim"] == 3
    assert v["basis"] == ["1", "x", "x^2"]

    m = json.loads(_run_cli("milnor", "--symbol", "p^2+q^2", "--cutoff", "6").stdout)
    assert m["dim"] == 1 and m["stabilized"]


def test_cli_trace():
    t = json.loads(_run_cli("trace", "1", "--levels", "5").stdout)
    from qmorse.series import ScalarSeries

    series = ScalarSeries.from_json(t["series"])
    import math

    for n in range(6):
        assert series.coeff((n, 0)) == Coefficient(math.factorial(n))


def test_cli_flow():
    proc = _run_cli(
        "flow", "--hamiltonian", "ad*a", "--observable", "a", "--order", "4"
    )
    payload = json.loads(proc.stdout)
    f = QSeries.from_json(payload)
    assert f.coeff((0, 1, 0, 1)) == I


def test_tokenizer_rational_edge():
    with pytest.raises(ParseError):
        tokenize("3/")
    with pytest.raises(ParseError):
        tokenize("3/0")
