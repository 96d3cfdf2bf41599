"""Number formatting for plain-text outputs."""

from __future__ import annotations

import math

import numpy as np


def format_number(value: object) -> str:
    """Shortest round-trip text for ints and floats."""

    if isinstance(value, bool):
        raise TypeError("Booleans are not numbers here")
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        number = float(value)
        if not math.isfinite(number):
            raise ValueError(f"Refusing to format non-finite value {number!r}")
        return repr(number)
    raise TypeError(f"Cannot format {type(value).__name__}")
