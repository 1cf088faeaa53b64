"""Weighted Fekete points: a particle-based check on the equilibrium measure.

The discrete energy is

    E_N = sum_{i<j} k(|x_i - x_j|) + (N - 1) sum_i Q(x_i),

whose per-particle stationarity condition, divided by N - 1, is the
gradient of U + Q with U the normalized empirical potential.  No closed form
of the equilibrium measure is used here; the analytic radial CDF only
enters the reported KS distance.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import numba
from scipy import stats

from .field import ChargeConfig, Q, Q_prime_over_r
from .geometry import kernel
from .measure import equilibrium_measure, write_csv

log = logging.getLogger(__name__)


class FieldNotConfiningError(RuntimeError):
    def __init__(self, msg: str = "field not confining"):
        super().__init__(msg)


class CoincidentPointsError(ValueError):
    pass


@dataclass
class ParticleSystem:
    """Points in R^d under the field of ``cfg`` (``cfg=None`` means Q = 0)."""

    points: np.ndarray
    cfg: Optional[ChargeConfig] = None
    seed: Optional[int] = None

    def __post_init__(self):
        self.points = np.array(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 2:
            raise ValueError("points must be an (n, d) array with n >= 2")
        if self.cfg is not None and self.cfg.d != self.points.shape[1]:
            raise ValueError("point dimension does not match cfg.d")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


# prefer OpenMP; an old system TBB otherwise triggers a warning on first use
numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]

ESCAPE_RATIO = 0.05


@dataclass(frozen=True)
class Schedule:
    """Descent controls.

    Directions use ``memory`` limited-memory BFGS pairs (0 for plain
    gradient descent).  No particle moves more than a cap per step; the
    cap starts at ``step0 * h2`` and becomes twice the last accepted
    displacement.  Trial steps are halved until the energy strictly
    decreases.  A particle beyond ``blowup * max(h1, h2)`` aborts the run.
    """

    gtol: float = 1e-5
    max_iters: int = 4000
    step0: float = 0.1
    min_sep: float = 1e-9
    blowup: float = 100.0
    jitter: float = 1e-3
    max_halvings: int = 60
    memory: int = 10
    parallel: bool = False


@dataclass
class OracleResult:
    energy: float
    radii: np.ndarray
    ks_distance: float
    min_radius: float
    max_radius: float
    iterations: int
    residual: float
    converged: bool
    points: np.ndarray = field(repr=False)
    energy_trace: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "ks_distance": self.ks_distance,
            "min_radius": self.min_radius,
            "max_radius": self.max_radius,
            "n": int(self.radii.size),
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "radii": self.radii.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def write_points_csv(self, path_or_file) -> None:
        header = [f"x{i + 1}" for i in range(self.points.shape[1])]
        write_csv(path_or_file, header, self.points.T)


@numba.njit(cache=True)
def _pair_energy_grad(x, d, min_sep2):
    """Pair energy sum_{i<j} k(|x_i - x_j|) and its gradient, serial loop
    order (bitwise reproducible).  Returns ``inf`` if two points are closer
    than ``sqrt(min_sep2)``."""
    n, dim = x.shape
    g = np.zeros_like(x)
    e = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for k in range(dim):
                t = x[i, k] - x[j, k]
                r2 += t * t
            if r2 <= min_sep2:
                return math.inf, g
            if d == 2:
                e -= 0.5 * math.log(r2)
                fac = -1.0 / r2
            else:
                inv = 1.0 / math.sqrt(r2) if d == 3 else r2 ** (-0.5 * (d - 2))
                e += inv
                fac = (2.0 - d) * inv / r2
            for k in range(dim):
                t = fac * (x[i, k] - x[j, k])
                g[i, k] += t
                g[j, k] -= t
    return e, g


@numba.njit(cache=True, parallel=True)
def _pair_energy_grad_parallel(x, d, min_sep2):
    # row-wise version: every i sums over all j != i, so rows are independent
    n, dim = x.shape
    g = np.zeros_like(x)
    rows = np.zeros(n)
    bad = np.zeros(n, dtype=np.bool_)
    for i in numba.prange(n):
        acc = 0.0
        for j in range(n):
            if j == i:
                continue
            r2 = 0.0
            for k in range(dim):
                t = x[i, k] - x[j, k]
                r2 += t * t
            if r2 <= min_sep2:
                bad[i] = True
                continue
            if d == 2:
                acc -= 0.5 * math.log(r2)
                fac = -1.0 / r2
            else:
                inv = 1.0 / math.sqrt(r2) if d == 3 else r2 ** (-0.5 * (d - 2))
                acc += inv
                fac = (2.0 - d) * inv / r2
            for k in range(dim):
                g[i, k] += fac * (x[i, k] - x[j, k])
        rows[i] = acc
    if bad.any():
        return math.inf, g
    return 0.5 * rows.sum(), g


def _energy_grad(cfg: Optional[ChargeConfig], x: np.ndarray, min_sep: float, parallel: bool = False):
    """``(E_N, grad E_N / (N - 1))``; E_N is ``inf`` on a separation violation."""
    n, d = x.shape
    kern = _pair_energy_grad_parallel if parallel else _pair_energy_grad
    e, g = kern(x, d, min_sep * min_sep)
    g /= n - 1
    if cfg is not None and math.isfinite(e):
        r = np.sqrt(np.einsum("ij,ij->i", x, x))
        e += (n - 1) * math.fsum(np.asarray(Q(cfg, r)).tolist())
        g += np.asarray(Q_prime_over_r(cfg, r))[:, None] * x
    return e, g


def discrete_energy(ps: ParticleSystem, parallel: bool = False) -> float:
    e, _ = _energy_grad(ps.cfg, ps.points, 0.0, parallel)
    if not math.isfinite(e):
        raise CoincidentPointsError("coincident points")
    return e


def local_frostman_residual(ps: ParticleSystem) -> float:
    """max_i |grad (U + Q)(x_i)| with U the potential of the other points / (N - 1)."""
    _, g = _energy_grad(ps.cfg, ps.points, 0.0)
    return float(np.max(np.linalg.norm(g, axis=1)))


def initial_points(cfg: ChargeConfig, n: int, rng: np.random.Generator, jitter: float) -> np.ndarray:
    """Uniform in the ball of radius 2 h2, plus a small Gaussian jitter."""
    d = cfg.d
    u = rng.standard_normal((n, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    rad = 2.0 * cfg.h2 * rng.random(n) ** (1.0 / d)
    return u * rad[:, None] + jitter * cfg.h2 * rng.standard_normal((n, d))


def _lbfgs_direction(g: np.ndarray, pairs) -> np.ndarray:
    """Two-loop recursion; ``pairs`` holds (s, y, 1/(y.s)) newest last."""
    q = g.copy()
    alphas = []
    for s_vec, y_vec, rho in reversed(pairs):
        a = rho * float(np.vdot(s_vec, q))
        q -= a * y_vec
        alphas.append(a)
    if pairs:
        s_vec, y_vec, _ = pairs[-1]
        q *= float(np.vdot(s_vec, y_vec)) / float(np.vdot(y_vec, y_vec))
    for (s_vec, y_vec, rho), a in zip(pairs, reversed(alphas)):
        b = rho * float(np.vdot(y_vec, q))
        q += (a - b) * s_vec
    return -q


def descend(cfg: ChargeConfig, x: np.ndarray, opts: Schedule = Schedule()):
    """Monotone backtracking descent on E_N starting from ``x``.

    Search directions come from a limited-memory BFGS recursion over the
    last ``opts.memory`` steps (``memory=0`` gives steepest descent).  The
    trial step is capped so that no particle moves more than the current
    cap (initially ``step0 * h2``), and is halved until the energy strictly
    decreases.  After an accepted step the cap becomes twice the largest
    displacement.  Returns ``(points, energy, iterations, converged, trace)``.
    """
    h = cfg.h2
    min_sep = opts.min_sep * h
    scale = max(cfg.h1, cfg.h2)
    e, g = _energy_grad(cfg, x, min_sep, opts.parallel)
    if not math.isfinite(e):
        raise CoincidentPointsError("initial configuration has coincident points")
    trace = [e]
    cap = opts.step0 * h
    pairs: deque = deque(maxlen=max(opts.memory, 1))
    converged = False
    it = 0
    while it < opts.max_iters:
        gnorm = float(np.sqrt(np.einsum("ij,ij->i", g, g)).max())
        if gnorm < opts.gtol:
            converged = True
            break
        it += 1
        p = _lbfgs_direction(g, pairs) if opts.memory > 0 and pairs else -g
        if float(np.vdot(p, g)) >= 0:
            p = -g
            pairs.clear()
        pmax = float(np.sqrt(np.einsum("ij,ij->i", p, p)).max())
        t = min(1.0, cap / pmax)
        for _ in range(opts.max_halvings):
            trial = x + t * p
            e_new, g_new = _energy_grad(cfg, trial, min_sep, opts.parallel)
            if e_new < e:
                break
            t *= 0.5
        else:
            # no decrease left at double precision
            converged = gnorm < 10 * opts.gtol
            break
        s_vec = trial - x
        y_vec = g_new - g
        sy = float(np.vdot(s_vec, y_vec))
        if opts.memory > 0 and sy > 1e-12 * float(np.vdot(y_vec, y_vec)):
            pairs.append((s_vec, y_vec, 1.0 / sy))
        cap = 2.0 * t * pmax
        x, e, g = trial, e_new, g_new
        trace.append(e)
        if float(np.max(np.linalg.norm(x, axis=1))) > opts.blowup * scale:
            raise FieldNotConfiningError()
    return x, e, it, converged, trace


def escape_gain(cfg: ChargeConfig, x: np.ndarray, radius: float) -> float:
    """Exact change of E_N when the outermost point is moved out along its
    ray to ``radius`` with all other points fixed.  Negative means the
    field cannot hold that point."""
    r = np.linalg.norm(x, axis=1)
    i = int(np.argmax(r))
    if r[i] >= radius:
        return -math.inf
    xi = x[i]
    y = xi * (radius / r[i]) if r[i] > 0 else np.eye(1, x.shape[1]).ravel() * radius
    others = np.delete(x, i, axis=0)
    d_old = np.linalg.norm(others - xi, axis=1)
    d_new = np.linalg.norm(others - y, axis=1)
    pair = math.fsum((np.asarray(kernel(cfg.d, d_new)) - np.asarray(kernel(cfg.d, d_old))).tolist())
    return pair + (x.shape[0] - 1) * (Q(cfg, radius) - Q(cfg, r[i]))


def escapes(cfg: ChargeConfig, x: np.ndarray, radius: float) -> bool:
    """True when sending the outermost point to ``radius`` gains more than
    ESCAPE_RATIO of the field work done on it.

    For net charge ``e = gamma2 - gamma1 < 1`` the ratio tends to
    ``(e - 1) / e``; on the weakly admissible line it is of lower order.
    """
    r = float(np.max(np.linalg.norm(x, axis=1)))
    if r >= radius:
        return True
    work = (x.shape[0] - 1) * abs(Q(cfg, radius) - Q(cfg, r))
    return escape_gain(cfg, x, radius) < -ESCAPE_RATIO * work


def minimize(cfg: ChargeConfig, n: int = 512, seed: int = 1, opts: Schedule = Schedule(),
             tol: float = 1e-12) -> OracleResult:
    """Minimize E_N from a seeded random start and compare the radii with
    the analytic radial CDF."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    x0 = initial_points(cfg, n, rng, opts.jitter)
    x, e, iters, converged, trace = descend(cfg, x0, opts)
    if escapes(cfg, x, opts.blowup * max(cfg.h1, cfg.h2)):
        raise FieldNotConfiningError()
    radii = np.sort(np.linalg.norm(x, axis=1))
    ps = ParticleSystem(x, cfg, seed)
    try:
        m = equilibrium_measure(cfg, tol)
        ks = float(stats.kstest(radii, m.mass_function).statistic)
    except ValueError:
        ks = math.nan
    res = OracleResult(
        energy=e, radii=radii, ks_distance=ks,
        min_radius=float(radii[0]), max_radius=float(radii[-1]),
        iterations=iters, residual=local_frostman_residual(ps),
        converged=converged, points=x, energy_trace=trace,
    )
    log.debug("oracle n=%d seed=%d iters=%d ks=%.4f", n, seed, iters, ks)
    return res
