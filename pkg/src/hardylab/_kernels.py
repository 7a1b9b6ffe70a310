"""Select the compiled kernels when available, else the numpy fallback.

Set HARDYLAB_PURE=1 to force the fallback.
"""

import os

BACKEND = "python"
if os.environ.get("HARDYLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from ._ckernels import abs_power_cells, eval_piecewise  # noqa: F401

        BACKEND = "cython"
    except ImportError:
        pass
if BACKEND == "python":
    from ._pykernels import abs_power_cells, eval_piecewise  # noqa: F401

__all__ = ["BACKEND", "eval_piecewise", "abs_power_cells"]
