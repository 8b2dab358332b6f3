"""Kernel selection: compiled Cython core when available, pure Python otherwise.

Set ``QMORSE_PURE=1`` to force the pure-Python kernel (used by the benchmark
and as an escape hatch on platforms without a compiler).
"""

import os

if os.environ.get("QMORSE_PURE"):
    from . import _core_py as impl
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as impl

BACKEND = impl.BACKEND
COEFF_ZERO = impl.COEFF_ZERO
COEFF_ONE = impl.COEFF_ONE
coeff_make = impl.coeff_make
coeff_add = impl.coeff_add
coeff_neg = impl.coeff_neg
coeff_sub = impl.coeff_sub
coeff_mul = impl.coeff_mul
coeff_mul_int = impl.coeff_mul_int
qmul = impl.qmul
