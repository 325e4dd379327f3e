"""Select the feasibility kernel at import time.

Set ``OCCULTIST_PURE_PYTHON=1`` to force the fallback.
"""

import os

KERNEL = "python"
if os.environ.get("OCCULTIST_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._lpkernel import solve  # type: ignore[attr-defined]

        KERNEL = "cython"
    except ImportError:
        from ._lpkernel_py import solve
else:
    from ._lpkernel_py import solve

from ._lpkernel_py import EQ, GE
from ._lpkernel_py import solve as solve_python

__all__ = ["EQ", "GE", "KERNEL", "solve", "solve_python"]
