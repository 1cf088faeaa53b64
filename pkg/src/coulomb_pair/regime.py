"""Support classification: the functions g_c, g_s and their roots.

``g_c`` generates the continuous density and ``g_s`` is the mass of the
singular sphere part of the signed equilibrium measure on a ball.  Their
zeros (``r_c``, ``R_s``) together with the zero ``R_0`` of Q' decide whether
the support is a ball, a shell, the whole space or the exterior of a ball.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .field import (
    WEAK_TOL,
    Admissibility,
    ChargeConfig,
    NotAdmissibleError,
    Q_prime,
    classify_admissibility,
)


class RegimeError(ValueError):
    pass


class CaseTag(enum.Enum):
    A1 = "A1"
    A2 = "A2"
    B = "B"
    C = "C"


class SupportKind(enum.Enum):
    BALL = "Ball"
    SHELL = "Shell"
    WHOLE_SPACE = "WholeSpace"
    COMPLEMENT_OF_BALL = "ComplementOfBall"


@dataclass(frozen=True)
class SupportSpec:
    """Radially symmetric support ``{inner <= |x| <= outer}``.

    An unbounded support has ``outer = math.inf``; code that integrates
    over the support must check :attr:`bounded`.
    """

    inner: float
    outer: float

    def __post_init__(self):
        if not (0.0 <= self.inner < self.outer):
            raise ValueError(f"bad support [{self.inner}, {self.outer}]")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.outer)

    @property
    def kind(self) -> SupportKind:
        if self.inner == 0.0:
            return SupportKind.BALL if self.bounded else SupportKind.WHOLE_SPACE
        return SupportKind.SHELL if self.bounded else SupportKind.COMPLEMENT_OF_BALL

    def contains(self, r):
        r = np.asarray(r, dtype=float)
        return (r >= self.inner) & (r <= self.outer)


@dataclass(frozen=True)
class Regime:
    case: CaseTag
    admissibility: Admissibility
    support: SupportSpec
    r_c: Optional[float] = None

    @property
    def kind(self) -> SupportKind:
        return self.support.kind

    def to_dict(self) -> dict:
        outer = self.support.outer
        return {
            "case": self.case.value,
            "admissibility": self.admissibility.value,
            "support_type": self.kind.value,
            "inner": self.support.inner,
            "outer": outer if math.isfinite(outer) else "inf",
            "r_c": self.r_c,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Regime":
        outer = data["outer"]
        return cls(
            case=CaseTag(data["case"]),
            admissibility=Admissibility(data["admissibility"]),
            support=SupportSpec(float(data["inner"]), math.inf if outer == "inf" else float(outer)),
            r_c=data.get("r_c"),
        )


def g_c(cfg: ChargeConfig, r):
    r2 = np.asarray(r, dtype=float) ** 2
    e = cfg.d / 2.0 + 1.0
    val = cfg.gamma2 * cfg.h2**2 / (r2 + cfg.h2**2) ** e
    if cfg.gamma1:
        val = val - cfg.gamma1 * cfg.h1**2 / (r2 + cfg.h1**2) ** e
    return float(val) if np.ndim(val) == 0 else val


def enclosed_fraction(cfg: ChargeConfig, r):
    """F(r) = r^d (gamma2 (r^2+h2^2)^{-d/2} - gamma1 (r^2+h1^2)^{-d/2}) = 1 - g_s(r).

    This is the mass of the continuous density d g_c/|S^{d-1}| inside B_r
    and also the sphere mass obtained by sweeping that part onto |x| = r.
    ``r = inf`` returns the limit gamma2 - gamma1.
    """
    r = np.asarray(r, dtype=float)
    d = cfg.d
    with np.errstate(divide="ignore", invalid="ignore"):
        inv2 = np.where(r > 0, 1.0 / (r * r), np.inf)
        t2 = (1.0 + cfg.h2**2 * inv2) ** (-d / 2.0)
        t1 = (1.0 + cfg.h1**2 * inv2) ** (-d / 2.0)
    val = cfg.gamma2 * t2 - cfg.gamma1 * t1
    val = np.where(r > 0, val, 0.0)
    return float(val) if val.ndim == 0 else val


def g_s(cfg: ChargeConfig, R):
    val = 1.0 - np.asarray(enclosed_fraction(cfg, R))
    return float(val) if val.ndim == 0 else val


def effective_config(cfg: ChargeConfig) -> ChargeConfig:
    """Equal heights collapse to a single attractor of strength gamma2 - gamma1."""
    if cfg.h1 == cfg.h2 and cfg.gamma1 > 0:
        return replace(cfg, gamma1=0.0, gamma2=cfg.excess)
    return cfg


def case_tag(cfg: ChargeConfig) -> CaseTag:
    """Four-way case split on (h1, h2, gamma2/gamma1).

    Boundary ties go to A2 / C, equal heights and gamma1 = 0 (ratio +inf)
    go to A2 unless h2 > h1.
    """
    h1, h2, d = cfg.h1, cfg.h2, cfg.d
    rho = cfg.ratio
    if h2 < h1:
        return CaseTag.A1 if rho < (h1 / h2) ** 2 else CaseTag.A2
    if h2 > h1:
        return CaseTag.B if rho < (h2 / h1) ** d else CaseTag.C
    return CaseTag.A2


def _require_solvable(cfg: ChargeConfig, tol: float) -> Admissibility:
    adm = classify_admissibility(cfg, tol)
    if adm is Admissibility.NOT_ADMISSIBLE:
        raise NotAdmissibleError()
    return adm


def _bisect_root(f, lo, hi):
    # f(lo) > 0 > f(hi)
    root = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return root


def solve_outer_radius(cfg: ChargeConfig, tol: float = WEAK_TOL) -> float:
    """Outer radius R_s, the positive zero of g_s, or ``math.inf``.

    The root is bracketed by doubling from R = 1 (g_s(0) = 1 > 0 and g_s < 0
    beyond the root) and polished with Brent's method.
    """
    adm = _require_solvable(cfg, tol)
    eff = effective_config(cfg)
    if adm is Admissibility.WEAKLY_ADMISSIBLE and case_tag(cfg) is not CaseTag.A1:
        return math.inf

    def f(R):
        return g_s(eff, R)

    hi = 1.0
    for _ in range(2100):
        if f(hi) < 0:
            break
        hi *= 2.0
    else:  # pragma: no cover - excluded by the sign analysis
        raise RegimeError("failed to bracket the outer radius")
    lo = 0.0
    # tighten the lower end so brentq starts from a short interval
    while hi / 2.0 > 0 and f(hi / 2.0) < 0:
        hi /= 2.0
    lo = hi / 2.0
    root = _bisect_root(f, lo, hi)
    # nudge to the float with the smallest residual around the Brent iterate
    cands = [root, np.nextafter(root, 0.0), np.nextafter(root, np.inf)]
    return float(min(cands, key=lambda x: abs(f(x))))


def solve_inner_radius(cfg: ChargeConfig, tol: float = WEAK_TOL) -> float:
    """Inner radius R_0 of a shell / exterior support: the positive zero of Q'.

    Closed form ``R_0^2 = (beta h2^2 - h1^2) / (1 - beta)``,
    ``beta = (gamma1/gamma2)^{2/d}``.
    """
    if cfg.gamma1 == 0 or case_tag(cfg) is not CaseTag.B:
        raise RegimeError("no inner radius in this regime")
    _require_solvable(cfg, tol)
    beta = (cfg.gamma1 / cfg.gamma2) ** (2.0 / cfg.d)
    R0sq = (beta * cfg.h2**2 - cfg.h1**2) / (1.0 - beta)
    if not R0sq > 0:  # pragma: no cover - excluded by case B
        raise RegimeError("no inner radius in this regime")
    return math.sqrt(R0sq)


def solve_density_zero(cfg: ChargeConfig, rel_tol: float = 1e-12) -> Optional[float]:
    """Zero r_c of g_c, or ``None`` when g_c keeps one sign on (0, inf).

    Returns ``0.0`` at the transition gamma2/gamma1 = (h2/h1)^d, where the
    zero sits at the origin.
    """
    if cfg.gamma1 <= 0:
        raise ValueError("solve_density_zero needs gamma1 > 0")
    alpha = (cfg.gamma2 * cfg.h2**2 / (cfg.gamma1 * cfg.h1**2)) ** (2.0 / (cfg.d + 2))
    if alpha == 1.0:
        return None
    rcsq = (alpha * cfg.h1**2 - cfg.h2**2) / (1.0 - alpha)
    scale = max(cfg.h1, cfg.h2) ** 2
    if abs(rcsq) <= rel_tol * scale:
        return 0.0
    if rcsq < 0:
        return None
    return math.sqrt(rcsq)


def classify(cfg: ChargeConfig, tol: float = WEAK_TOL) -> Regime:
    adm = _require_solvable(cfg, tol)
    case = case_tag(cfg)
    r_c = solve_density_zero(cfg) if cfg.gamma1 > 0 and cfg.h1 != cfg.h2 else None
    if r_c == 0.0:
        r_c = None
    outer = solve_outer_radius(cfg, tol)
    inner = solve_inner_radius(cfg, tol) if case is CaseTag.B else 0.0

    if case is CaseTag.A1 and math.isfinite(outer) and r_c is not None and not outer < r_c:
        raise RegimeError(f"ordering violated: R_s={outer} >= r_c={r_c} in case A1")
    if case is CaseTag.B and r_c is not None and not r_c < outer:
        raise RegimeError(f"ordering violated: r_c={r_c} >= R_s={outer} in case B")
    if case is CaseTag.B and not inner < outer:
        raise RegimeError(f"ordering violated: R_0={inner} >= R_s={outer}")

    return Regime(case=case, admissibility=adm, support=SupportSpec(inner, outer), r_c=r_c)


def transition_point(h1: float, h2: float, d: int) -> tuple:
    """Coordinates (gamma1, gamma2) of the point where the boundary line of
    the case split meets the weakly admissible line gamma2 = gamma1 + 1."""
    if h2 < h1:
        den = h1**2 - h2**2
        return h2**2 / den, h1**2 / den
    if h2 > h1:
        den = h2**d - h1**d
        return h1**d / den, h2**d / den
    raise ValueError("equal heights have no transition point")


def check_derivative_form(cfg: ChargeConfig, R: float) -> float:
    """Residual of R^{d-1} Q'(R) = max(1, d-2) (equivalent to g_s(R) = 0)."""
    c = max(1, cfg.d - 2)
    return R ** (cfg.d - 1) * Q_prime(cfg, R) - c
