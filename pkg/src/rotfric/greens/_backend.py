"""Pick the compiled k-parallel kernel when it was built, else numpy.

Set ``ROTFRIC_BACKEND=python`` to force the fallback.
"""
import os

BACKEND = "python"
if os.environ.get("ROTFRIC_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:  # extension not built
        kernels = None
if BACKEND == "python":
    from . import _pykernels as kernels
