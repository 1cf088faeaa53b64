"""Potentials of radially symmetric measures via Newton's theorem.

A normalized uniform measure on the sphere |x| = R has potential
``k(max(r, R))`` at |x| = r, so a radial measure is a 1-D superposition of
such spheres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ._quadrature import EPSREL, integrate_interval
from .geometry import check_dimension, kernel_scalar


@dataclass(frozen=True)
class SphereMeasure:
    """``mass`` times the normalized surface measure on |x| = radius."""

    radius: float
    mass: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")


@dataclass(frozen=True)
class RadialMeasure:
    """Radial density part plus finitely many sphere masses.

    ``weight(rho)`` is the mass per unit radius (density times
    ``|S^{d-1}| rho^{d-1}``), a scalar function, supported on
    ``[inner, outer]``; ``outer`` may be ``math.inf``.
    """

    d: int
    weight: Callable[[float], float]
    inner: float = 0.0
    outer: float = math.inf
    spheres: Tuple[SphereMeasure, ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        check_dimension(self.d)

    def continuous_mass(self, epsrel: float = EPSREL) -> float:
        return integrate_interval(self.weight, self.inner, self.outer,
                                  scale=self.scale, epsrel=epsrel)

    def total_mass(self) -> float:
        return self.continuous_mass() + math.fsum(s.mass for s in self.spheres)


def radial_potential(m: RadialMeasure, r: float, epsrel: float = EPSREL) -> float:
    """Potential of ``m`` at any point with |x| = r.

    The integrand is split at rho = r where ``k(max(r, rho))`` has a kink.
    """
    r = float(r)
    if r < 0:
        raise ValueError("r must be >= 0")
    d, w = m.d, m.weight
    total = 0.0
    split = min(max(r, m.inner), m.outer)
    if r > 0 and split > m.inner:
        inside = integrate_interval(w, m.inner, split, epsrel=epsrel)
        total += inside * kernel_scalar(d, r)
    if split < m.outer:
        def outside(rho):
            return w(rho) * kernel_scalar(d, rho)

        total += integrate_interval(outside, split, m.outer, scale=max(m.scale, split), epsrel=epsrel)
    for s in m.spheres:
        total += s.mass * kernel_scalar(d, max(r, s.radius))
    return total


def radial_potential_grid(m: RadialMeasure, radii, workers: int = 1) -> np.ndarray:
    """Evaluate :func:`radial_potential` on a grid.

    Each grid point is independent, so a threaded evaluation returns the
    same floats as the serial one.
    """
    radii = [float(x) for x in np.asarray(radii, dtype=float).ravel()]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(lambda x: radial_potential(m, x), radii))
    else:
        vals = [radial_potential(m, x) for x in radii]
    return np.array(vals)
