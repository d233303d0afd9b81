"""Model parameterization shared by the analytic and simulation code."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class ModelParams:
    """Skewness ``p``, drift ``m1`` on [0, inf), ``m2`` on (-inf, 0), horizon ``T``.

    The process always starts at 0. Dry friction means ``m1 = -m`` and
    ``m2 = m`` for a single level ``m``; build it with :meth:`dry_friction`.
    """

    p: float
    m1: float = 0.0
    m2: float = 0.0
    T: float = 1.0

    def __post_init__(self):
        for name in ("p", "m1", "m2", "T"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie in (0, 1), got {self.p}")
        if not self.T > 0.0:
            raise DomainError(f"T must be > 0, got {self.T}")

    @classmethod
    def dry_friction(cls, p: float, m: float, T: float = 1.0) -> "ModelParams":
        m = float(m)
        return cls(p=float(p), m1=0.0 - m, m2=m, T=float(T))

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def is_dry_friction(self) -> bool:
        return self.m1 == -self.m2

    @property
    def m(self) -> float:
        self.require_dry_friction()
        return self.m2

    @property
    def untested_regime(self) -> bool:
        # physical dry friction pulls toward 0, i.e. m > 0
        return self.is_dry_friction and self.m2 < 0

    def require_dry_friction(self):
        if not self.is_dry_friction:
            raise ConfigurationError(
                f"this law needs dry friction (m1 = -m2); got m1={self.m1}, m2={self.m2}"
            )

    def to_dict(self) -> dict:
        d = {"p": self.p, "m1": self.m1, "m2": self.m2, "T": self.T}
        if self.is_dry_friction:
            d["m"] = self.m2
        return d
