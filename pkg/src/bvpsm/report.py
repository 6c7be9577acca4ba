"""Structured results of checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .graded import GradedPoly

__all__ = ["Residual", "Report"]


@dataclass(frozen=True)
class Residual:
    label: str
    poly: GradedPoly
    kind: str = "bulk"  # "bulk" | "boundary"

    def __post_init__(self):
        if self.kind not in ("bulk", "boundary"):
            raise ValueError(f"unknown residual kind {self.kind!r}")

    @property
    def vanishes(self) -> bool:
        return self.poly.is_zero()


@dataclass(frozen=True)
class Report:
    """Outcome of a check: passes iff every residual is the zero polynomial."""

    name: str
    residuals: tuple[Residual, ...]
    details: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return all(r.vanishes for r in self.residuals)

    def __getitem__(self, label: str) -> GradedPoly:
        for r in self.residuals:
            if r.label == label:
                return r.poly
        raise KeyError(label)

    def bulk(self) -> tuple[Residual, ...]:
        return tuple(r for r in self.residuals if r.kind == "bulk")

    def boundary(self) -> tuple[Residual, ...]:
        return tuple(r for r in self.residuals if r.kind == "boundary")
