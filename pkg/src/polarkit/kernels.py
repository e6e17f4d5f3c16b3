"""Backend selection for the hot decoding kernels.

The compiled extension ``polarkit._kernels_c`` is used when importable;
otherwise the pure-Python reference ``polarkit._kernels_py`` takes over.
Set ``POLARKIT_BACKEND=python`` or ``POLARKIT_BACKEND=native`` to force a
choice (forcing ``native`` raises if the extension is missing). Both
backends implement the same contracts and are cross-checked in the test
suite; ``benchmarks/bench_decoders.py`` compares their throughput.
"""

import os

_forced = os.environ.get("POLARKIT_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _kernels_py as _impl
elif _forced == "native":
    from . import _kernels_c as _impl
else:
    try:
        from . import _kernels_c as _impl
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
polar_encode = _impl.polar_encode
sc_decode = _impl.sc_decode
scl_decode = _impl.scl_decode
weight_spectrum = _impl.weight_spectrum

__all__ = ["BACKEND", "polar_encode", "sc_decode", "scl_decode", "weight_spectrum"]
