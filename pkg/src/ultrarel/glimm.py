"""Glimm random-choice scheme on a staggered grid, with variation functionals as monitors.

Grid layout: ``dx`` is the half-width of a cell, so cells are ``2 dx`` wide.  For
``n_cells`` = N, even levels hold N cells centred at ``x_min + (2j+1) dx`` and odd
levels hold N+1 cells centred at ``x_min + 2j dx``.  Going from an even to an odd
level the end cells are extended by constant ghost cells.

The functionals are evaluated on time levels.  The wave census of a level is
read from the Riemann problems between its adjacent cells, which are the same
problems the next step solves.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .eos import DomainError, EosParams
from .riemann import solve as riemann_solve
from .states import (PrimitiveState, invariants_from_primitive,
                     primitive_from_invariants)
from .wavecurves import delta_of_strength_deriv, shock_slope

log = logging.getLogger(__name__)


class MonitorViolation(RuntimeError):
    """A runtime monitor failed; ``report`` names the level, cell and quantity."""

    def __init__(self, report: dict, diagnostics: "RunDiagnostics | None" = None):
        self.report = report
        self.diagnostics = diagnostics
        super().__init__(", ".join(f"{k}={v}" for k, v in report.items()))


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class GridConfig:
    dx: float
    dt: float
    t_end: float
    domain: tuple[float, float]
    boundary: str = "extrapolate"

    def __post_init__(self):
        if not (self.dx > 0 and self.dt > 0):
            raise DomainError("dx and dt must be positive")
        if not self.dx / self.dt > 1.0:
            raise DomainError(f"CFL requires dx/dt > 1, got {self.dx / self.dt}")
        if not self.t_end >= 0:
            raise DomainError("t_end must be >= 0")
        if not self.domain[1] > self.domain[0]:
            raise DomainError("domain must satisfy x_min < x_max")
        if self.boundary != "extrapolate":
            raise DomainError("only constant-extrapolation boundaries are supported")
        n = (self.domain[1] - self.domain[0]) / (2.0 * self.dx)
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise DomainError("domain length must be an integer number of cells of width 2 dx")

    @classmethod
    def from_cells(cls, domain: Sequence[float], n_cells: int, t_end: float,
                   cfl_ratio: float = 1.05) -> "GridConfig":
        """Grid with ``n_cells`` cells; dt is the largest step with dx/dt >= cfl_ratio landing on t_end."""
        if n_cells < 1:
            raise DomainError("n_cells must be >= 1")
        if not cfl_ratio > 1.0:
            raise DomainError("cfl_ratio must exceed 1")
        x0, x1 = float(domain[0]), float(domain[1])
        dx = (x1 - x0) / (2.0 * n_cells)
        steps = max(1, math.ceil(t_end * cfl_ratio / dx - 1e-12))
        dt = t_end / steps if t_end > 0 else dx / cfl_ratio
        return cls(dx, dt, t_end, (x0, x1))

    @property
    def n_cells(self) -> int:
        return int(round((self.domain[1] - self.domain[0]) / (2.0 * self.dx)))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def centres(self, level: int) -> np.ndarray:
        x0, N = self.domain[0], self.n_cells
        if level % 2 == 0:
            return x0 + (2.0 * np.arange(N) + 1.0) * self.dx
        return x0 + 2.0 * np.arange(N + 1) * self.dx


# --------------------------------------------------------------------------
# sampling sequences


def radical_inverse(n: int, base: int = 2) -> float:
    """van der Corput radical inverse of ``n`` in ``base``."""
    inv, f = 0.0, 1.0 / base
    while n > 0:
        n, digit = divmod(n, base)
        inv += digit * f
        f /= base
    return inv


@dataclass(frozen=True)
class SeededPseudorandom:
    seed: int = 0

    def thetas(self) -> Iterator[float]:
        rng = np.random.default_rng(self.seed)
        while True:
            yield float(rng.uniform(-1.0, 1.0))


@dataclass(frozen=True)
class VanDerCorput:
    """theta_n = 2 * vdc(n + start) - 1; with start = 1 the first value is 0 (cell midpoints)."""

    base: int = 2
    start: int = 1

    def __post_init__(self):
        if self.base < 2:
            raise DomainError("van der Corput base must be >= 2")
        if self.start < 0:
            raise DomainError("start index must be >= 0")

    def thetas(self) -> Iterator[float]:
        n = self.start
        while True:
            yield 2.0 * radical_inverse(n, self.base) - 1.0
            n += 1


SamplingSequence = SeededPseudorandom | VanDerCorput


# --------------------------------------------------------------------------
# initial data


@dataclass(frozen=True)
class RiemannProfile:
    left: PrimitiveState
    right: PrimitiveState
    x0: float = 0.0

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        L = x < self.x0
        return (np.where(L, self.left.rho, self.right.rho),
                np.where(L, self.left.v, self.right.v),
                np.where(L, self.left.S, self.right.S))

    def support(self) -> tuple[float, float]:
        return self.x0, self.x0


@dataclass(frozen=True)
class PiecewiseProfile:
    """``states[i]`` holds on ``[breakpoints[i-1], breakpoints[i])``; one more state than breakpoints."""

    breakpoints: tuple[float, ...]
    states: tuple[PrimitiveState, ...]

    def __post_init__(self):
        if len(self.states) != len(self.breakpoints) + 1:
            raise DomainError("piecewise profile needs exactly one more state than breakpoints")
        if any(b1 <= b0 for b0, b1 in zip(self.breakpoints, self.breakpoints[1:])):
            raise DomainError("breakpoints must be strictly increasing")

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(np.asarray(self.breakpoints, dtype=float), x, side="right")
        rho = np.array([p.rho for p in self.states])[idx]
        v = np.array([p.v for p in self.states])[idx]
        S = np.array([p.S for p in self.states])[idx]
        return rho, v, S

    def support(self) -> tuple[float, float]:
        if not self.breakpoints:
            return 0.0, 0.0
        return self.breakpoints[0], self.breakpoints[-1]


@dataclass(frozen=True)
class SmoothProfile:
    """Named smooth test data.

    ``gaussian_pulse``: rho = rho0 (1 + amplitude exp(-((x - centre)/width)^2)), v = v0, S = S0.
    """

    name: str = "gaussian_pulse"
    rho0: float = 1.0
    v0: float = 0.0
    S0: float = 1.0
    amplitude: float = 1.0
    centre: float = 0.0
    width: float = 0.1

    def __post_init__(self):
        if self.name != "gaussian_pulse":
            raise DomainError(f"unknown smooth profile {self.name!r}")
        PrimitiveState(self.rho0, self.v0, self.S0)
        if not (self.width > 0 and self.amplitude > -1):
            raise DomainError("gaussian_pulse needs width > 0 and amplitude > -1")

    def primitive(self, x):
        x = np.asarray(x, dtype=float)
        bump = np.exp(-(((x - self.centre) / self.width) ** 2))
        return (self.rho0 * (1.0 + self.amplitude * bump),
                np.full_like(x, self.v0), np.full_like(x, self.S0))

    def support(self) -> tuple[float, float]:
        # bump < 1e-27 beyond 8 widths
        return self.centre - 8.0 * self.width, self.centre + 8.0 * self.width


Profile = RiemannProfile | PiecewiseProfile | SmoothProfile


# --------------------------------------------------------------------------
# grid solution


@dataclass(frozen=True)
class GridSolution:
    """Cell values of one time level, stored as invariants (r, s, Sigma)."""

    level: int
    t: float
    x: np.ndarray
    r: np.ndarray
    s: np.ndarray
    Sigma: np.ndarray

    def primitive(self, params: EosParams):
        return primitive_from_invariants(self.r, self.s, self.Sigma, params)

    def states(self, params: EosParams) -> list[PrimitiveState]:
        rho, v, S = self.primitive(params)
        return [PrimitiveState(float(a), float(b), float(c)) for a, b, c in zip(rho, v, S)]

    def __len__(self):
        return self.x.shape[0]


def _k(params: EosParams) -> float:
    return params.a / (1.0 + params.a2)


def init(profile, grid: GridConfig, theta0: float, params: EosParams) -> GridSolution:
    """Level-0 data: each cell takes the profile value at its centre shifted by theta0 * dx."""
    if not -1.0 <= theta0 <= 1.0:
        raise DomainError("theta0 must lie in [-1, 1]")
    x = grid.centres(0)
    rho, v, S = (np.asarray(q, dtype=float) for q in profile.primitive(x + theta0 * grid.dx))
    bad = ~((rho > 0) & (np.abs(v) < 1) & (S > 0))
    if bad.any():
        j = int(np.argmax(bad))
        raise DomainError(f"invalid initial state in cell {j} at x={x[j]}: "
                          f"rho={rho[j]}, v={v[j]}, S={S[j]}")
    r, s, Sig = invariants_from_primitive(rho, v, S, params)
    return GridSolution(0, 0.0, x, np.asarray(r, float), np.asarray(s, float),
                        np.broadcast_to(np.asarray(Sig, float), x.shape).copy())


def _interfaces(sol: GridSolution):
    """Left/right invariant arrays of the Riemann problems the next step solves."""
    r, s, Sig = sol.r, sol.s, sol.Sigma
    if sol.level % 2 == 0:
        r = np.concatenate([r[:1], r, r[-1:]])
        s = np.concatenate([s[:1], s, s[-1:]])
        Sig = np.concatenate([Sig[:1], Sig, Sig[-1:]])
    return r[:-1], s[:-1], Sig[:-1], r[1:], s[1:], Sig[1:]


def _advance(sol: GridSolution, theta: float, grid: GridConfig, params: EosParams,
             use_numba=None):
    lr = _interfaces(sol)
    raw = kernels.solve_batch(*lr, params.a, params.gamma, use_numba)
    xi = theta * grid.dx / grid.dt
    new = kernels.sample_batch(*lr, raw, xi, params.a, use_numba)
    level = sol.level + 1
    nxt = GridSolution(level, level * grid.dt, grid.centres(level), new[0], new[1], new[2])
    return nxt, raw


def step(sol: GridSolution, theta_n: float, params: EosParams, grid: GridConfig) -> GridSolution:
    """Advance one level: solve every interface problem and sample at theta_n * dx past the interface."""
    if not -1.0 <= theta_n <= 1.0:
        raise DomainError("theta_n must lie in [-1, 1]")
    return _advance(sol, theta_n, grid, params)[0]


# --------------------------------------------------------------------------
# functionals and variations


@dataclass(frozen=True)
class Census:
    alpha: float
    beta: float
    mu: float
    eta: float
    abs_delta: float
    delta_alpha: float
    delta_beta: float
    n_shock1: int
    n_shock3: int


def census_from_raw(raw: np.ndarray) -> Census:
    e1, e2, e3 = raw[4], raw[5], raw[6]
    return Census(float(np.sum(np.maximum(-e1, 0.0))), float(np.sum(np.maximum(-e3, 0.0))),
                  float(np.sum(np.maximum(e1, 0.0))), float(np.sum(np.maximum(e3, 0.0))),
                  float(np.sum(np.abs(e2))), float(np.sum(raw[9])), float(np.sum(raw[10])),
                  int(np.count_nonzero(raw[7] > 0)), int(np.count_nonzero(raw[8] > 0)))


def census(level: GridSolution, params: EosParams) -> Census:
    r, s, S = level.r, level.s, level.Sigma
    raw = kernels.solve_batch(r[:-1], s[:-1], S[:-1], r[1:], s[1:], S[1:], params.a, params.gamma)
    return census_from_raw(raw)


def _F(c: Census, V: float) -> float:
    return c.alpha + c.beta + V


def _L(c: Census, V: float, M0: float, variant: str) -> float:
    sign = {"proof": 1.0, "display": -1.0}[variant]
    return (c.alpha - M0 * c.delta_alpha) + (c.beta - M0 * c.delta_beta) + sign * M0 * c.abs_delta + V


def functional_F(level: GridSolution, V: float, params: EosParams) -> float:
    """Sum of shock strengths crossing the level, plus V."""
    return _F(census(level, params), V)


def functional_L(level: GridSolution, V: float, M0: float, params: EosParams,
                 variant: str = "proof") -> float:
    """Entropy-weighted functional; ``variant`` picks the sign of the M0 * sum|delta| term.

    ``"proof"`` adds it (the form whose monotonicity is monitored), ``"display"`` subtracts it.
    """
    return _L(census(level, params), V, M0, variant)


_FIELDS = ("rs", "r", "s", "lnrho", "rapidity", "sigma", "rho", "v", "S")


def variation(level: GridSolution, field: str, params: EosParams | None = None) -> float:
    """Total variation of a piecewise-constant field over the level."""
    if field not in _FIELDS:
        raise ValueError(f"field must be one of {_FIELDS}")
    tv = lambda q: float(np.sum(np.abs(np.diff(q))))  # noqa: E731
    if field == "rs":
        return tv(level.r) + tv(level.s)
    if field in ("r", "s"):
        return tv(getattr(level, field))
    if field == "sigma":
        return tv(level.Sigma)
    if params is None:
        raise ValueError(f"field {field!r} needs params")
    if field == "lnrho":
        return tv((level.s - level.r) / (2.0 * _k(params)))
    if field == "rapidity":
        return tv(0.5 * (level.r + level.s))
    rho, v, S = level.primitive(params)
    return tv({"rho": rho, "v": v, "S": S}[field])


# --------------------------------------------------------------------------
# compact-set constants


@dataclass(frozen=True)
class Constants:
    V: float            # Var_rs of level-0 data
    V_full: float       # Var_rs + Var Sigma of level-0 data
    N: float            # 8 V
    centre: tuple[float, float]
    radius: float       # 2 N
    omega_bar: float    # largest wave strength inside the ball
    C0: float
    C0_floor_binds: bool
    M_bar: float
    M: float
    M0: float


def compact_constants(V: float, centre: tuple[float, float], params: EosParams,
                      V_full: float | None = None) -> Constants:
    N = 8.0 * V
    radius = 2.0 * N
    omega_bar = 2.0 * radius
    if omega_bar > 0:
        slope = shock_slope(omega_bar, params)
        M_bar = 2.0 * delta_of_strength_deriv(omega_bar, params)
    else:
        slope, M_bar = 0.0, 0.0
    C0 = max(0.5, slope)
    M = M_bar / (1.0 - C0)
    M0 = 1.0 / (2.0 * M) if M > 0 else 0.125
    return Constants(V, V if V_full is None else V_full, N, centre, radius, omega_bar,
                     C0, slope <= 0.5, M_bar, M, M0)


# --------------------------------------------------------------------------
# run


@dataclass
class RunDiagnostics:
    constants: Constants
    t: list = field(default_factory=list)
    F: list = field(default_factory=list)
    L: list = field(default_factory=list)
    L_display: list = field(default_factory=list)
    var_rs: list = field(default_factory=list)
    var_lnrho: list = field(default_factory=list)
    var_rapidity: list = field(default_factory=list)
    var_sigma: list = field(default_factory=list)
    max_ball_dist: list = field(default_factory=list)
    census: list = field(default_factory=list)
    boundary_clear: bool = True

    @property
    def n_levels(self) -> int:
        return len(self.F)

    def bounds(self, params: EosParams) -> dict:
        c = self.constants
        a = params.a
        return {"var_rs_over_F": 4.0,
                "var_lnrho": 16.0 * (1.0 + a * a) / a * c.V,
                "var_rapidity": 8.0 * c.V,
                "var_sigma": 2.0 * (4.0 + c.M) * (self.L[0] if self.L else 0.0),
                "ball_radius": c.radius}

    def rows(self):
        for i in range(self.n_levels):
            yield (i, self.t[i], self.F[i], self.L[i], self.var_rs[i], self.var_lnrho[i],
                   self.var_rapidity[i], self.var_sigma[i])


@dataclass
class RunResult:
    levels: list
    diagnostics: RunDiagnostics


def _record(diag: RunDiagnostics, sol: GridSolution, raw_interior: np.ndarray, params: EosParams):
    c = diag.constants
    cen = census_from_raw(raw_interior)
    diag.t.append(sol.t)
    diag.F.append(_F(cen, c.V))
    diag.L.append(_L(cen, c.V, c.M0, "proof"))
    diag.L_display.append(_L(cen, c.V, c.M0, "display"))
    diag.var_rs.append(variation(sol, "rs"))
    diag.var_lnrho.append(variation(sol, "lnrho", params))
    diag.var_rapidity.append(variation(sol, "rapidity", params))
    diag.var_sigma.append(variation(sol, "sigma"))
    diag.max_ball_dist.append(float(np.max(np.hypot(sol.r - c.centre[0], sol.s - c.centre[1]))))
    diag.census.append(cen)


def _check(diag: RunDiagnostics, sol: GridSolution, params: EosParams, slack_rel: float):
    n = diag.n_levels - 1
    F0 = diag.F[0]
    tol = slack_rel * F0
    b = diag.bounds(params)

    def fail(quantity, value, bound, cell=None):
        raise MonitorViolation({"level": n, "t": sol.t, "cell": cell, "quantity": quantity,
                                "value": value, "bound": bound}, diag)

    bad = ~(np.isfinite(sol.r) & np.isfinite(sol.s) & np.isfinite(sol.Sigma))
    if bad.any():
        fail("state_validity", "non-finite", "finite", int(np.argmax(bad)))
    if n > 0:
        if diag.F[n] > diag.F[n - 1] + tol:
            fail("F", diag.F[n], diag.F[n - 1] + tol)
        if diag.L[n] > diag.L[n - 1] + tol:
            fail("L", diag.L[n], diag.L[n - 1] + tol)
    if diag.var_rs[n] > 4.0 * diag.F[n] * (1 + slack_rel) + tol:
        fail("var_rs", diag.var_rs[n], 4.0 * diag.F[n])
    for key in ("var_lnrho", "var_rapidity", "var_sigma"):
        val = getattr(diag, key)[n]
        if val > b[key] * (1 + slack_rel) + tol:
            fail(key, val, b[key])
    # round-off floor: the ball can have radius 0 (constant data)
    ball_tol = tol + 1e-12 * (1.0 + math.hypot(*diag.constants.centre))
    if diag.max_ball_dist[n] > b["ball_radius"] * (1 + slack_rel) + ball_tol:
        dist = np.hypot(sol.r - diag.constants.centre[0], sol.s - diag.constants.centre[1])
        fail("ball", diag.max_ball_dist[n], b["ball_radius"], int(np.argmax(dist)))


def run(profile, grid: GridConfig, seq, params: EosParams, *, store_stride: int | None = 1,
        monitor: bool = True, slack_rel: float = 1e-12, use_numba=None) -> RunResult:
    """Run to ``grid.t_end``.

    Levels kept: every ``store_stride``-th plus the last (``None`` keeps only the first
    and last).  With ``monitor`` on, the first failing monitor raises
    :class:`MonitorViolation` carrying the diagnostics so far.
    """
    thetas = seq.thetas()
    sol = init(profile, grid, next(thetas), params)

    lo, hi = profile.support()
    reach = grid.t_end + 2.0 * grid.dx
    clear = lo - reach > grid.domain[0] and hi + reach < grid.domain[1]
    if not clear:
        log.warning("waves may reach the boundary before t_end: support [%g, %g], domain %s",
                    lo, hi, grid.domain)

    V = variation(sol, "rs")
    consts = compact_constants(V, (float(sol.r[0]), float(sol.s[0])), params,
                               V_full=V + variation(sol, "sigma"))
    diag = RunDiagnostics(consts, boundary_clear=clear)
    levels = [sol]

    n_steps = grid.n_steps
    for n in range(n_steps + 1):
        if n < n_steps:
            theta = next(thetas)
            nxt, raw = _advance(sol, theta, grid, params, use_numba)
            interior = raw[:, 1:-1] if sol.level % 2 == 0 else raw
        else:
            r, s, S = sol.r, sol.s, sol.Sigma
            interior = kernels.solve_batch(r[:-1], s[:-1], S[:-1], r[1:], s[1:], S[1:],
                                           params.a, params.gamma, use_numba)
        _record(diag, sol, interior, params)
        if monitor:
            _check(diag, sol, params, slack_rel)
        if n == n_steps:
            break
        sol = nxt
        if (store_stride and sol.level % store_stride == 0) or sol.level == n_steps:
            levels.append(sol)
    return RunResult(levels, diag)


def exact_profile(fan_raw: np.ndarray, left_inv, right_inv, x: np.ndarray, x0: float, t: float,
                  params: EosParams):
    """Invariants of a single Riemann solution at points ``x`` and time ``t`` > 0."""
    m = x.shape[0]
    args = [np.full(m, float(v)) for v in (*left_inv, *right_inv)]
    sol = np.repeat(np.asarray(fan_raw, dtype=float)[:, None], m, axis=1)
    return kernels.sample_batch(*args, sol, (x - x0) / t, params.a)


def l1_error(level: GridSolution, profile: RiemannProfile, grid: GridConfig,
             params: EosParams) -> float:
    """L1 distance in (rho, v, S) between the level and the exact Riemann solution."""
    fan = riemann_solve(profile.left, profile.right, params)
    r, s, Sig = exact_profile(fan.raw, (fan.inv_left.r, fan.inv_left.s, fan.inv_left.Sigma),
                              (fan.inv_right.r, fan.inv_right.s, fan.inv_right.Sigma),
                              level.x, profile.x0, level.t, params)
    ex = primitive_from_invariants(r, s, Sig, params)
    num = level.primitive(params)
    w = 2.0 * grid.dx
    return float(sum(np.sum(np.abs(np.asarray(a) - np.asarray(b))) for a, b in zip(num, ex)) * w)
