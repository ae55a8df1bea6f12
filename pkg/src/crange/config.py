"""Numerical tolerances shared by every module."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    exact: float = 1e-10  # structural predicates (hermitian, unitary, ...)
    nilp: float = 1e-8  # spectral / rank decisions
    feas: float = 1e-8  # feasibility residuals, relative to ||A||_F

    def with_feas(self, feas: float | None) -> "Tolerances":
        if feas is None:
            return self
        return replace(self, feas=float(feas))


TOL = Tolerances()
