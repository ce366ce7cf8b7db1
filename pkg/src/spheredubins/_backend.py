"""Select the kernel backend at import time.

The compiled extension is preferred; the pure-Python module is the
fallback.  ``SPHEREDUBINS_BACKEND`` forces the choice ("cython" or
"python") and makes a missing extension a hard error when set to
"cython".
"""

import os

_forced = os.environ.get("SPHEREDUBINS_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _core_py as core
    BACKEND = "python"
elif _forced in ("", "cython"):
    try:
        from . import _core as core  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from . import _core_py as core
        BACKEND = "python"
else:
    raise RuntimeError(
        f"SPHEREDUBINS_BACKEND={_forced!r} not understood; "
        "use 'cython' or 'python'"
    )
