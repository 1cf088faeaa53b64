"""The equilibrium measure: radial density, enclosed mass and sampling."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ._quadrature import integrate_interval
from .field import WEAK_TOL, ChargeConfig
from .geometry import sphere_area
from .regime import Regime, classify, enclosed_fraction, g_c

RADIUS_TOL = 1e-10


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Equilibrium measure of ``cfg``: density ``d g_c(|x|) / |S^{d-1}|`` on
    the support described by ``regime``.

    ``robin`` (the equilibrium constant F_Q) is left empty until a
    verification run fills it in through :meth:`with_robin`.
    """

    cfg: ChargeConfig
    regime: Regime
    robin: Optional[float] = None
    density_scale: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "density_scale", self.cfg.d / sphere_area(self.cfg.d))

    @property
    def d(self) -> int:
        return self.cfg.d

    @property
    def inner(self) -> float:
        return self.regime.support.inner

    @property
    def outer(self) -> float:
        return self.regime.support.outer

    @property
    def length_scale(self) -> float:
        return max(self.cfg.h1 if self.cfg.gamma1 else 0.0, self.cfg.h2, self.inner)

    def with_robin(self, value: float) -> "EquilibriumMeasure":
        return replace(self, robin=float(value))

    def density(self, r):
        """Density with respect to Lebesgue measure on R^d at |x| = r."""
        r = np.asarray(r, dtype=float)
        val = np.where(self.regime.support.contains(r), self.density_scale * g_c(self.cfg, r), 0.0)
        return float(val) if val.ndim == 0 else val

    def radial_weight(self, r):
        """Mass per unit radius, ``|S^{d-1}| r^{d-1} density(r) = d r^{d-1} g_c(r)``."""
        r = np.asarray(r, dtype=float)
        val = self.cfg.d * r ** (self.cfg.d - 1) * g_c(self.cfg, r)
        val = np.where(self.regime.support.contains(r), val, 0.0)
        return float(val) if val.ndim == 0 else val

    def mass_function(self, r):
        """mu_Q({|x| <= r}), from the closed-form antiderivative."""
        r = np.asarray(r, dtype=float)
        clipped = np.clip(r, self.inner, self.outer)
        val = np.asarray(enclosed_fraction(self.cfg, clipped)) - enclosed_fraction(self.cfg, self.inner)
        return float(val) if val.ndim == 0 else val

    def quadrature_mass(self) -> float:
        """Total mass by adaptive quadrature of :meth:`radial_weight`."""
        d, cfg = self.cfg.d, self.cfg

        def w(r):
            return d * r ** (d - 1) * g_c(cfg, r)

        return integrate_interval(w, self.inner, self.outer, scale=self.length_scale)

    def inverse_mass(self, u, tol: float = RADIUS_TOL):
        """Radii with ``mass_function(r) = u`` by vectorised bisection."""
        u = np.asarray(u, dtype=float)
        lo = np.full(u.shape, self.inner)
        if self.regime.support.bounded:
            hi = np.full(u.shape, self.outer)
        else:
            hi = np.full(u.shape, max(2.0 * self.inner, self.length_scale))
            while True:
                short = self.mass_function(hi) < u
                if not short.any():
                    break
                hi = np.where(short, 2.0 * hi, hi)
        while np.max(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            below = self.mass_function(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= tol) or np.all(mid == lo) or np.all(mid == hi):
                break
        return 0.5 * (lo + hi)

    def sample(self, n: int, seed: int) -> np.ndarray:
        """``n`` i.i.d. points of R^d drawn from the measure."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = np.random.default_rng(seed)
        u = rng.random(n)
        radii = self.inverse_mass(u)
        g = rng.standard_normal((n, self.cfg.d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return g * radii[:, None]

    def profile(self, radii) -> dict:
        radii = np.asarray(radii, dtype=float)
        return {"r": radii, "density": self.density(radii), "mass": self.mass_function(radii)}


def equilibrium_measure(cfg: ChargeConfig, tol: float = WEAK_TOL) -> EquilibriumMeasure:
    return EquilibriumMeasure(cfg, classify(cfg, tol))


def write_csv(path_or_file, header, columns) -> None:
    """Write equal-length columns as CSV with 17 significant digits."""
    rows = zip(*[np.asarray(c, dtype=float) for c in columns])

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(format(v, ".17g") for v in row)

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)


def write_samples_csv(path_or_file, points) -> None:
    points = np.asarray(points, dtype=float)
    header = [f"x{i + 1}" for i in range(points.shape[1])]
    write_csv(path_or_file, header, points.T)


def write_profile_csv(path_or_file, m: EquilibriumMeasure, radii) -> None:
    """Density and mass profile as CSV ``r,density,mass``."""
    p = m.profile(radii)
    write_csv(path_or_file, ["r", "density", "mass"], [p["r"], p["density"], p["mass"]])
