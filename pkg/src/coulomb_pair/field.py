"""External field of the attractive-repellent charge pair and admissibility."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .geometry import check_dimension

WEAK_TOL = 1e-12


class NotAdmissibleError(ValueError):
    """Raised when gamma2 - gamma1 < 1: no equilibrium measure exists."""

    def __init__(self, msg: str = "no equilibrium measure exists (not admissible)"):
        super().__init__(msg)


class Admissibility(enum.Enum):
    ADMISSIBLE = "Admissible"
    WEAKLY_ADMISSIBLE = "WeaklyAdmissible"
    NOT_ADMISSIBLE = "NotAdmissible"


@dataclass(frozen=True)
class ChargeConfig:
    """A repellent charge ``gamma1`` at height ``h1`` and an attractor of
    strength ``gamma2`` at height ``h2`` above R^d.

    ``gamma2`` is stored positive; the minus sign lives in the formulas.
    """

    d: int
    gamma1: float
    gamma2: float
    h1: float
    h2: float

    def __post_init__(self):
        object.__setattr__(self, "d", check_dimension(self.d))
        for name in ("gamma1", "gamma2", "h1", "h2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.gamma1 < 0:
            raise ValueError("gamma1 must be >= 0")
        if self.gamma2 <= 0:
            raise ValueError("gamma2 must be > 0")
        if self.h1 <= 0 or self.h2 <= 0:
            raise ValueError("heights h1, h2 must be > 0")

    @property
    def excess(self) -> float:
        """gamma2 - gamma1, the net attracting charge."""
        return self.gamma2 - self.gamma1

    @property
    def ratio(self) -> float:
        """gamma2 / gamma1, +inf for a single attractor."""
        return math.inf if self.gamma1 == 0 else self.gamma2 / self.gamma1

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ChargeConfig":
        return cls(
            d=data["d"],
            gamma1=data["gamma1"],
            gamma2=data["gamma2"],
            h1=data["h1"],
            h2=data["h2"],
        )

    @classmethod
    def from_json(cls, text: str) -> "ChargeConfig":
        return cls.from_dict(json.loads(text))


def _radial(r):
    arr = np.asarray(r, dtype=float)
    return arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def Q(cfg: ChargeConfig, r):
    """Field value at any point with |x| = r."""
    r = _radial(r)
    d = cfg.d
    r2 = r * r
    if d == 2:
        val = 0.5 * cfg.gamma2 * np.log(r2 + cfg.h2**2)
        if cfg.gamma1:
            val = val - 0.5 * cfg.gamma1 * np.log(r2 + cfg.h1**2)
    else:
        p = (2.0 - d) / 2.0
        val = cfg.gamma1 * (r2 + cfg.h1**2) ** p - cfg.gamma2 * (r2 + cfg.h2**2) ** p
    return _out(val)


def Q_prime_over_r(cfg: ChargeConfig, r):
    """Q'(r)/r, which is smooth at r = 0 (used for Cartesian gradients)."""
    r2 = _radial(r) ** 2
    d = cfg.d
    c = max(1, d - 2)
    val = c * (
        cfg.gamma2 * (r2 + cfg.h2**2) ** (-d / 2.0)
        - cfg.gamma1 * (r2 + cfg.h1**2) ** (-d / 2.0)
    )
    return _out(val)


def Q_prime(cfg: ChargeConfig, r):
    """Radial derivative of Q.

    Note the gamma1 term carries h1; printed versions of this formula
    with h2 in both terms do not differentiate Q.
    """
    r = _radial(r)
    return _out(r * Q_prime_over_r(cfg, r))


def Q_second(cfg: ChargeConfig, r):
    r2 = _radial(r) ** 2
    d = cfg.d
    c = max(1, d - 2)
    e = d / 2.0 + 1.0
    val = c * (
        cfg.gamma2 * ((1 - d) * r2 + cfg.h2**2) / (r2 + cfg.h2**2) ** e
        - cfg.gamma1 * ((1 - d) * r2 + cfg.h1**2) / (r2 + cfg.h1**2) ** e
    )
    return _out(val)


def classify_admissibility(cfg: ChargeConfig, tol: float = WEAK_TOL) -> Admissibility:
    if tol <= 0:
        raise ValueError("tol must be positive")
    gap = cfg.excess - 1.0
    if abs(gap) <= tol:
        return Admissibility.WEAKLY_ADMISSIBLE
    if gap > 0:
        return Admissibility.ADMISSIBLE
    return Admissibility.NOT_ADMISSIBLE


def radial_convexity_condition(cfg: ChargeConfig) -> bool:
    """True iff r^{d-1} Q'(r) is nondecreasing on (0, inf)."""
    if cfg.gamma1 == 0:
        return True
    t = cfg.h1 / cfg.h2
    lower = (cfg.gamma1 / cfg.gamma2) ** (1.0 / cfg.d)
    upper = (cfg.gamma2 / cfg.gamma1) ** 0.5
    return lower <= t <= upper
