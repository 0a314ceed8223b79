"""Backend selection for the assembly hot kernel.

The compiled extension is preferred; set MODCHAIN_PURE_PYTHON=1 to force
the numpy fallback (used by the benchmark and CI without a compiler).
"""

from __future__ import annotations

import os

from . import _assembly_py

if os.environ.get("MODCHAIN_PURE_PYTHON", "").lower() not in ("", "0", "false"):
    _impl = _assembly_py
    BACKEND = "python"
else:
    try:
        from . import _assembly_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _assembly_py
        BACKEND = "python"

xxz_triplets = _impl.xxz_triplets
csr_matvec_complex = _impl.csr_matvec_complex
