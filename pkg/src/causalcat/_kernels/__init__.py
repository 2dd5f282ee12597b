"""Hot kernels with a compiled core and a pure-Python fallback.

The Cython extension is used when it was built and importable; set
``CAUSALCAT_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _natcore_py

BACKEND = "python"
solve = _natcore_py.solve

if os.environ.get("CAUSALCAT_PURE_PYTHON") != "1":
    try:
        from . import _natcore
    except ImportError:  # extension not built
        _natcore = None
    else:
        solve = _natcore.solve
        BACKEND = "cython"
else:
    _natcore = None

__all__ = ["BACKEND", "solve"]
