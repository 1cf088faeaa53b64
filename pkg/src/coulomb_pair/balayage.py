"""Signed equilibrium measures on balls and balayage of point masses.

All surface integrals here are zonal and are reduced to one integral over
the polar angle, with weight ``sin^{d-2}(theta) |S^{d-2}| / |S^{d-1}|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quadrature import integrate_interval
from .field import ChargeConfig
from .geometry import check_dimension, sphere_area
from .potential import RadialMeasure, SphereMeasure
from .regime import enclosed_fraction, g_c, g_s


def zonal_average(d: int, f, epsrel: float = 1e-12, points=None) -> float:
    """Average over the unit sphere S^{d-1} of a function of ``cos(theta)``."""
    check_dimension(d)
    c = sphere_area(d - 1) / sphere_area(d)

    def integrand(theta):
        return f(math.cos(theta)) * math.sin(theta) ** (d - 2)

    return c * integrate_interval(integrand, 0.0, math.pi, epsrel=epsrel, points=points)


@dataclass(frozen=True)
class SignedEquilibrium:
    """Signed equilibrium measure of the closed ball B_R in the field of ``cfg``.

    Continuous part ``d g_c(|x|) / |S^{d-1}|`` on B_R (negative where g_c is)
    and a sphere part of mass ``g_s(R)`` on |x| = R.
    """

    cfg: ChargeConfig
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("R must be positive")

    @property
    def singular(self) -> SphereMeasure:
        return SphereMeasure(self.radius, g_s(self.cfg, self.radius))

    def continuous_density(self, r):
        r = np.asarray(r, dtype=float)
        d = self.cfg.d
        val = np.where(r <= self.radius, d / sphere_area(d) * g_c(self.cfg, r), 0.0)
        return float(val) if val.ndim == 0 else val

    @property
    def continuous_mass(self) -> float:
        return enclosed_fraction(self.cfg, self.radius)

    @property
    def total_mass(self) -> float:
        return self.continuous_mass + self.singular.mass

    def as_radial(self) -> RadialMeasure:
        cfg = self.cfg
        d = cfg.d
        a2, b2 = cfg.h2**2, cfg.h1**2
        e = d / 2.0 + 1.0

        def weight(rho):
            rr = rho * rho
            return d * rho ** (d - 1) * (cfg.gamma2 * a2 / (rr + a2) ** e - cfg.gamma1 * b2 / (rr + b2) ** e)

        return RadialMeasure(d, weight, 0.0, self.radius, (self.singular,), scale=self.radius)


def signed_equilibrium_ball(cfg: ChargeConfig, R: float) -> SignedEquilibrium:
    return SignedEquilibrium(cfg, float(R))


def bal_point_to_plane(d: int, height: float, x_radius):
    """Density at |x| = r of the weak balayage of a unit mass at (0, height) onto R^d.

    ``d h^2 / (|S^{d-1}| (r^2 + h^2)^{(d+2)/2})``; for d = 2 this is
    ``h^2 / (pi (r^2 + h^2)^2)``.  Its total mass is 1.
    """
    d = check_dimension(d)
    if height == 0:
        raise ValueError("height must be nonzero")
    r = np.asarray(x_radius, dtype=float)
    h2 = float(height) ** 2
    val = d * h2 / (sphere_area(d) * (r * r + h2) ** ((d + 2) / 2.0))
    return float(val) if val.ndim == 0 else val


def plane_balayage_measure(d: int, height: float) -> RadialMeasure:
    d = check_dimension(d)
    h2 = float(height) ** 2
    e = (d + 2) / 2.0

    def weight(rho):
        return d * h2 * rho ** (d - 1) / (rho * rho + h2) ** e

    return RadialMeasure(d, weight, 0.0, math.inf, scale=abs(height))


def bal_point_to_ball_boundary(d: int, u_radius: float, R: float, s_angle_cos):
    """Surface density on S_R (w.r.t. unnormalized surface measure) of the
    balayage of a unit mass at distance ``u_radius`` from the origin.

    For |u| > R the mass is swept onto the ball B_R, for |u| < R onto the
    complement of the open ball. ``s_angle_cos`` is cos of the angle between
    u and the boundary point s.
    """
    d = check_dimension(d)
    if not R > 0:
        raise ValueError("R must be positive")
    if u_radius == R:
        raise ValueError("u must not lie on the sphere |x| = R")
    c = np.asarray(s_angle_cos, dtype=float)
    dist2 = u_radius**2 + R**2 - 2.0 * u_radius * R * c
    val = abs(u_radius**2 - R**2) / (R * dist2 ** (d / 2.0) * sphere_area(d))
    return float(val) if val.ndim == 0 else val


def bal_point_to_ball_mass(d: int, u_radius: float, R: float) -> float:
    """Total mass of the ball balayage above.

    Mass is kept when sweeping outward or in the plane; sweeping a point
    at |u| > R onto B_R in d >= 3 keeps only ``(R/|u|)^{d-2}``.
    """
    d = check_dimension(d)
    if u_radius == R:
        raise ValueError("u must not lie on the sphere |x| = R")
    if d == 2 or u_radius < R:
        return 1.0
    return (R / u_radius) ** (d - 2)


def sphere_kernel_integral(d: int, R: float) -> float:
    """Mean over S^{d-1} of ``|s - R e_1|^{-d}``."""
    check_dimension(d)
    if R == 1:
        raise ValueError("sphere_kernel_integral diverges at R = 1")
    if not R > 0:
        raise ValueError("R must be positive")
    if R > 1:
        return 1.0 / (R ** (d - 2) * (R * R - 1.0))
    return 1.0 / (1.0 - R * R)


def sphere_kernel_integral_quadrature(d: int, R: float) -> float:
    """The same mean, by polar-angle quadrature."""
    return zonal_average(d, lambda c: (1.0 + R * R - 2.0 * R * c) ** (-d / 2.0))


def exterior_sweep_mass(cfg: ChargeConfig, R: float) -> float:
    """Sphere mass produced by sweeping the continuous part of the signed
    equilibrium inside B_R out onto |x| = R."""
    if not R > 0:
        raise ValueError("R must be positive")
    return enclosed_fraction(cfg, R)
