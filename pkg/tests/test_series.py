"""QSeries / ScalarSeries container semantics: caps, canonical form, JSON."""

import random
from fractions import Fraction

import pytest

from qmorse.errors import DomainError, ResourceError
from qmorse.field import Coefficient
from qmorse.series import (
    QSeries,
    ScalarSeries,
    SIG_HT,
    SIG_ZHT,
    a_op,
    adag,
    harmonic,
    hbar_op,
    one,
    q_op,
    series_from_json,
    t_op,
)

from oracles import random_qseries


def test_zero_series_has_empty_map():
    f = QSeries({(0, 0, 0, 0): 0}, t_cap=2, weight_cap=4)
    assert len(f) == 0 and not f


def test_caps_truncate_on_construction():
    f = QSeries({(4, 0, 0, 0): 1, (1, 0, 0, 0): 1, (0, 0, 0, 3): 1}, t_cap=2, weight_cap="3/2")
    assert len(f) == 1
    assert f.coeff((1, 0, 0, 0)) == Coefficient(1)


def test_half_integer_weight_cap():
    f = QSeries({(1, 0, 0, 0): 1}, t_cap=0, weight_cap="1/2")
    assert len(f) == 1
    assert f.weight_cap == Fraction(1, 2)
    with pytest.raises(ValueError):
        QSeries({}, t_cap=0, weight_cap="1/3")


def test_mul_takes_min_caps():
    f = adag(4, 8)
    g = a_op(2, 3)
    h = f * g
    assert h.t_cap == 2 and h.weight_cap == Fraction(3)


def test_insertion_order_is_canonicalized():
    items = [((1, 1, 0, 0), 2), ((0, 0, 1, 0), 1), ((2, 2, 0, 0), Fraction(1, 3))]
    f = QSeries(dict(items), t_cap=2, weight_cap=8)
    g = QSeries(dict(reversed(items)), t_cap=2, weight_cap=8)
    assert f == g
    assert f.to_json() == g.to_json()


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        QSeries({(-1, 0, 0, 0): 1}, t_cap=1, weight_cap=2)


def test_term_guard(monkeypatch):
    monkeypatch.setenv("QMORSE_TERM_GUARD", "3")
    f = QSeries({(i, 0, 0, 0): 1 for i in range(6)}, t_cap=0, weight_cap=12)
    with pytest.raises(ResourceError):
        _ = f * f


def test_json_round_trip_qseries():
    rng = random.Random(7)
    for _ in range(20):
        f = random_qseries(rng)
        assert QSeries.from_json(f.to_json()) == f
    assert isinstance(series_from_json(harmonic(2, 4).to_json()), QSeries)


def test_json_weight_cap_rendering():
    f = QSeries({(1, 0, 0, 0): 1}, t_cap=0, weight_cap="7/2")
    payload = f.to_json()
    assert payload["weight_cap"] == "7/2"
    assert payload["terms"][0]["coef"] == {"r": "1", "i": "0", "r2": "0", "ir2": "0"}
    assert QSeries.from_json(payload) == f


def test_scalar_signature_mismatch_is_error():
    s1 = ScalarSeries({(0, 0): 1}, vars=SIG_HT, t_cap=2, weight_cap=4)
    s2 = ScalarSeries({(0, 0, 0): 1}, vars=SIG_ZHT, t_cap=2, weight_cap=4)
    with pytest.raises(DomainError):
        _ = s1 + s2  # type: ignore[operator]


def test_scalar_series_mul_and_caps():
    z = ScalarSeries({(1, 0, 0): 1}, vars=SIG_ZHT, t_cap=2, weight_cap=1)
    z2 = z * z
    assert not z2  # weight cap 1 kills z^2
    z = ScalarSeries({(1, 0, 0): 1}, vars=SIG_ZHT, t_cap=2, weight_cap=4)
    assert (z * z).coeff((2, 0, 0)) == Coefficient(1)


def test_scalar_json_round_trip():
    s = ScalarSeries(
        {(1, 2, 0): Fraction(1, 3), (0, 0, 2): -2}, vars=SIG_ZHT, t_cap=4, weight_cap=8
    )
    assert ScalarSeries.from_json(s.to_json()) == s
    assert isinstance(series_from_json(s.to_json()), ScalarSeries)


def test_t_slice_and_dt():
    t = t_op(3, 4)
    f = harmonic(3, 4) + t * t
    assert f.t_slice(2) == one(3, 4)
    assert f.dt().t_slice(1) == one(3, 4) + one(3, 4)  # d/dt t^2 = 2t


def test_div_hbar_exactness():
    assert hbar_op(1, 4).div_hbar() == one(1, 4)
    with pytest.raises(DomainError):
        q_op(1, 4).div_hbar()


def test_immutability_of_operands():
    f = harmonic(2, 4)
    g = adag(2, 4)
    before = f.to_json()
    _ = f * g
    _ = f + g
    _ = -f
    assert f.to_json() == before
