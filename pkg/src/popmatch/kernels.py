"""Backend selection for the enumeration kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback.  Set ``POPMATCH_PURE_PYTHON=1`` to force the fallback.
"""

import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKENDS: dict[str, ModuleType] = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

if _compiled is not None and not os.environ.get("POPMATCH_PURE_PYTHON"):
    DEFAULT = "cython"
else:
    DEFAULT = "python"


def get_backend(name: str | None = None) -> ModuleType:
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None


UNMATCHED = _kernels_py.UNMATCHED
