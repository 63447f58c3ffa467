"""Uniform check records shared by the suites and the CLI."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = ["CheckRecord", "SCHEMA_VERSION", "RECORD_FIELDS"]

SCHEMA_VERSION = 1

RECORD_FIELDS = (
    "suite",
    "check_id",
    "paper_anchor",
    "q",
    "cutoff",
    "value",
    "expected",
    "residual",
    "tolerance",
    "pass",
)


def _jsonable(x):
    """Plain JSON types; non-finite floats become strings, complex a pair."""
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, complex):
        return _jsonable(x.real) if x.imag == 0 else [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


@dataclass(frozen=True)
class CheckRecord:
    """One verified statement.

    ``residual`` is compared against ``tolerance``; ``value``/``expected``
    are informational (they may be ``None`` for pure identities).
    """

    suite: str
    check_id: str
    paper_anchor: str
    q: float | None
    cutoff: str | None
    value: object
    expected: object
    residual: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict, compare=False)

    def as_dict(self, details: bool = False) -> dict:
        """Schema fields in order; ``details`` appends the free-form extras."""
        d = asdict(self)
        extra = d.pop("extra")
        d["pass"] = bool(d.pop("passed"))
        out = {k: _jsonable(d[k]) for k in RECORD_FIELDS}
        if details and extra:
            out["details"] = _jsonable(extra)
        return out

    def sort_key(self):
        return (self.suite, self.check_id, -1.0 if self.q is None else self.q, self.cutoff or "")

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.suite}/{self.check_id} q={self.q} residual={self.residual:.3e} tol={self.tolerance:.1e}"
