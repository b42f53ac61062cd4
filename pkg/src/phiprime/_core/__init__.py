"""Hot kernels: saturation engine and VM pool.

The compiled extension ``_ccore`` is used when it was built; otherwise the
pure-Python ``_pycore`` twin is selected at import. Both expose the same API
and produce identical step counts.
"""

from . import _pycore
from ._pycore import J_AXIOM, J_MP, J_NONE, J_TOP, ST_DECIDED, ST_EXHAUSTED, ST_RUNNING, ST_SATURATED

try:
    from . import _ccore
except ImportError:  # extension not built
    _ccore = None

BACKENDS = {"python": _pycore}
if _ccore is not None:
    BACKENDS["cython"] = _ccore

BACKEND = "cython" if _ccore is not None else "python"


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (default: the import-time choice)."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
