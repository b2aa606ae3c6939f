"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernels`` module is used. Setting ``METRIC_FORGE_PURE_PYTHON=1``
forces the fallback.
"""
import os

from . import _pykernels

python_backend = _pykernels
compiled_backend = None

if not os.environ.get("METRIC_FORGE_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = "cython" if backend is compiled_backend else "python"

pair_index = backend.pair_index
build_edges = backend.build_edges
lex_toposort = backend.lex_toposort
compat_violations = backend.compat_violations
triangle_violations = backend.triangle_violations
premise_search = backend.premise_search
