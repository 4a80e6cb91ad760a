"""Uniform return type for quantifiers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

ANALYTIC = "analytic"
NUMERIC = "numeric"


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays (including complex ones) into JSON types.

    Complex arrays become ``{"re": [...], "im": [...], "shape": [...]}``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {
                "shape": list(obj.shape),
                "re": obj.real.ravel().tolist(),
                "im": obj.imag.ravel().tolist(),
            }
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


@dataclass(frozen=True)
class MeasureResult:
    """Value of a quantifier together with how it was obtained.

    Attributes
    ----------
    value : float
        The quantifier value.
    witness : Any
        Optimizer certificate: a closest free state, an optimal measurement
        direction, optimal angles, or ``None``.
    method : str
        ``"analytic"`` for closed forms, ``"numeric"`` for optimizer output.
    tol : float
        Accuracy claimed for ``value``.
    """

    value: float
    witness: Any = None
    method: str = ANALYTIC
    tol: float = 1e-10
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in (ANALYTIC, NUMERIC):
            raise ValueError(f"unknown method tag {self.method!r}")

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        out = {
            "value": float(self.value),
            "method": self.method,
            "tol": float(self.tol),
            "witness": to_jsonable(self.witness),
        }
        if self.extras:
            out["extras"] = to_jsonable(self.extras)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)
