"""The compiled kernel and the pure fallback must agree bit-for-bit."""

import random

import pytest

from qmorse._kernel import _core_py

try:
    from qmorse._kernel import _core  # type: ignore[attr-defined]
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled kernel not built")


def _raw_terms(rng, count=10):
    out = {}
    for _ in range(count):
        exp = (rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 2), rng.randint(0, 2))
        out[exp] = _core_py.coeff_make(
            rng.randint(-9, 9), rng.randint(-9, 9), rng.randint(-9, 9),
            rng.randint(-9, 9), rng.randint(1, 8),
        )
    return out


@needs_compiled
def test_coeff_ops_agree():
    rng = random.Random(4)
    for _ in range(300):
        x = _core_py.coeff_make(
            rng.randint(-20, 20), rng.randint(-20, 20), rng.randint(-20, 20),
            rng.randint(-20, 20), rng.randint(1, 12),
        )
        y = _core_py.coeff_make(
            rng.randint(-20, 20), rng.randint(-20, 20), rng.randint(-20, 20),
            rng.randint(-20, 20), rng.randint(1, 12),
        )
        assert _core.coeff_add(x, y) == _core_py.coeff_add(x, y)
        assert _core.coeff_mul(x, y) == _core_py.coeff_mul(x, y)
        assert _core.coeff_sub(x, y) == _core_py.coeff_sub(x, y)
        n = rng.randint(-6, 6)
        assert _core.coeff_mul_int(x, n) == _core_py.coeff_mul_int(x, n)


@needs_compiled
def test_qmul_agrees():
    rng = random.Random(8)
    for _ in range(40):
        A = _raw_terms(rng, rng.randint(1, 8))
        B = _raw_terms(rng, rng.randint(1, 8))
        fast = _core.qmul(A, B, 4, 16, 10**6)
        slow = _core_py.qmul(A, B, 4, 16, 10**6)
        assert fast == slow


@needs_compiled
def test_guard_agrees():
    A = {(i, 0, 0, 0): _core_py.COEFF_ONE for i in range(8)}
    with pytest.raises(MemoryError):
        _core.qmul(A, A, 4, 100, 3)
    with pytest.raises(MemoryError):
        _core_py.qmul(A, A, 4, 100, 3)
