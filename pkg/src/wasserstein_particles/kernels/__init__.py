"""Kernel backend selection.

The compiled extension is used when importable; set the environment variable
``WASSERSTEIN_PARTICLES_PURE=1`` to force the pure-Python kernels (used by
the benchmark and the backend-equivalence tests).
"""

import os

from . import pure

if os.environ.get("WASSERSTEIN_PARTICLES_PURE", "").strip() not in ("", "0"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

ball_walk_chunk = _impl.ball_walk_chunk
sde_chunk = _impl.sde_chunk
sde_chunk_qv = _impl.sde_chunk_qv


def get_backends():
    """(name, module) pairs of all available backends, compiled first."""
    out = []
    try:
        from . import _core
        out.append(("compiled", _core))
    except ImportError:
        pass
    out.append(("pure", pure))
    return out
