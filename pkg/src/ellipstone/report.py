"""Machine-readable verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA = 1


def jsonable(x):
    """Convert numpy scalars, Fractions and complex values for JSON output."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, complex):
        return {"re": jsonable(x.real), "im": jsonable(x.imag)}
    if hasattr(x, "tolist"):
        return jsonable(x.tolist())
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return str(x)


@dataclass
class VerificationReport:
    """Outcome of one check.

    ``passed`` is true exactly when ``max_rel_err <= tolerance``.  Exact
    checks (``exact=True``) use 0.0 / 1.0 as a mismatch indicator instead of
    a numerical residual and carry a witness term on failure.
    """

    check: str
    params: dict
    samples: list
    max_rel_err: float
    tolerance: float
    passed: bool
    exact: bool = False
    wall_time: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, check, params, samples, tolerance, exact=False, extra=None):
        errs = [float(s.get("rel_err", 0.0)) for s in samples]
        worst = max(errs, default=0.0)
        if any(math.isnan(e) for e in errs):
            worst = math.inf
        return cls(
            check=check,
            params=dict(params),
            samples=list(samples),
            max_rel_err=worst,
            tolerance=float(tolerance),
            passed=worst <= tolerance,
            exact=exact,
            extra=dict(extra or {}),
        )

    def to_dict(self):
        out = {
            "schema": SCHEMA,
            "check": self.check,
            "params": self.params,
            "exact": self.exact,
            "max_rel_err": self.max_rel_err,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "samples": self.samples,
        }
        if self.extra:
            out["extra"] = self.extra
        if self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return jsonable(out)

    def to_json(self, **kw):
        kw.setdefault("indent", 2)
        kw.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kw)


def rel_sample(inp, value, reference, scale=None):
    """Sample dict with absolute error and error relative to `scale` (default |reference|)."""
    value = complex(value) if isinstance(value, complex) else float(value)
    reference = complex(reference) if isinstance(reference, complex) else float(reference)
    abs_err = abs(value - reference)
    denom = abs(reference) if scale is None else float(scale)
    rel = abs_err / denom if denom > 0 else (0.0 if abs_err == 0 else math.inf)
    return {"input": inp, "value": value, "reference": reference, "abs_err": abs_err, "rel_err": rel}
