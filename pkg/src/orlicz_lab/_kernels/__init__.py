"""Kernel backend selection.

The compiled Cython core is preferred when present; the numpy fallback is
always importable.  Set ``ORLICZ_LAB_DISABLE_EXT=1`` to force the fallback
(used by the benchmark and the backend-agreement tests).
"""

from __future__ import annotations

import os

from . import _fallback

FAM_POWER = _fallback.FAM_POWER
FAM_POWER_SCALED = _fallback.FAM_POWER_SCALED
FAM_EXP_POWER = _fallback.FAM_EXP_POWER
FAM_ENTROPY = _fallback.FAM_ENTROPY
FAM_LOG_QUOTIENT = _fallback.FAM_LOG_QUOTIENT
FAM_EXP_QUARTIC = _fallback.FAM_EXP_QUARTIC

fallback = _fallback

if os.environ.get("ORLICZ_LAB_DISABLE_EXT"):
    active = _fallback
else:
    try:
        from . import _core as active  # type: ignore[no-redef]
    except ImportError:
        active = _fallback

BACKEND = active.BACKEND_NAME

eval_family = active.eval_family
modular_weighted = active.modular_weighted
lux_norm_family = active.lux_norm_family
