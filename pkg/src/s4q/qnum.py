"""q-analogue arithmetic.

Every coefficient in the package is built from q-numbers
``[z] = (q**z - q**-z) / (q - 1/q)``.  Functions accept python scalars or
numpy arrays; array input is evaluated elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["QContext", "q_number", "q_number_product"]


@dataclass(frozen=True)
class QContext:
    """Deformation parameter plus the numerical tolerances used by the checks."""

    q: float
    tol_relation: float = 1e-9
    tol_series: float = 1e-10

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"q must lie in (0, 1), got {self.q!r}")
        if self.tol_relation <= 0 or self.tol_series <= 0:
            raise ValueError("tolerances must be strictly positive")


def _q(ctx):
    return ctx.q if isinstance(ctx, QContext) else float(ctx)


def q_number(z, ctx):
    """Return ``[z]`` for a scalar or array ``z``.

    ``ctx`` may be a :class:`QContext` or a bare float ``q``.
    """
    q = _q(ctx)
    if isinstance(z, np.ndarray):
        z = z.astype(float)
        return (q**z - q ** (-z)) / (q - 1.0 / q)
    z = float(z)
    if z == 0.0:
        return 0.0
    return (q**z - q ** (-z)) / (q - 1.0 / q)


def q_number_product(zs, ctx) -> float:
    """Product of q-numbers with magnitudes paired large-with-small.

    Each intermediate stays near the geometric mean of the factors, which keeps
    products such as ``[j-m][j+m+1]`` clear of overflow for large labels.
    """
    factors = [q_number(z, ctx) for z in zs]
    if not factors:
        return 1.0
    if any(f == 0.0 for f in factors):
        return 0.0
    sign = -1.0 if sum(f < 0 for f in factors) % 2 else 1.0
    mags = sorted(abs(f) for f in factors)
    result = 1.0
    lo, hi = 0, len(mags) - 1
    while lo <= hi:
        if lo == hi:
            result *= mags[lo]
        else:
            result *= mags[lo] * mags[hi]
        lo += 1
        hi -= 1
    if not math.isfinite(result):
        raise OverflowError("q-number product out of binary64 range")
    return sign * result
