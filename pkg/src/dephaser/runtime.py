"""Process-level helpers: worker-pool sizing and deterministic text output."""
from __future__ import annotations

import math
import os


def worker_count() -> int:
    """Thread count from DEPHASER_THREADS; 0 or unset means all cores.

    Results never depend on this value, only wall time does: work items
    are mapped in deterministic order and reduced sequentially.
    """
    raw = os.environ.get("DEPHASER_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"DEPHASER_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("DEPHASER_THREADS must be >= 0")
    if n == 0:
        return os.cpu_count() or 1
    return n


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal for CSV cells; infinities print as inf."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)
