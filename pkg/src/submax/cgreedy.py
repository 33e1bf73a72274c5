"""Two-stage continuous greedy with an l-inf dampening cap, plus a
double-greedy fallback, swept over the switch time theta.

Stage one grows x from 0 for time theta using the capped oracle
argmax{ <grad F(x) o (1-x), c> : c in C, ||c||_inf <= alpha } and the
multiplicative Euler update x <- x + delta * v o (1-x).  Stage two continues
from x(theta) with the uncapped oracle until time 1, giving the greedy
candidate y(1).  The fallback recomputes the oracle direction at x(theta)
*without* the cap, giving p, and runs double greedy over the box [0, p] to
extract z.  The best candidate over all theta and both branches wins.

The cap slows the growth of ||x||_inf, so the discrete envelopes

    stage one:  1 - x_i(t) >= (1 - delta*alpha)^(t/delta)
    stage two:  1 - y_i(t) >= (1 - delta*alpha)^(theta/delta)
                              * (1 - delta)^((t-theta)/delta)

hold at every step by construction; they are asserted during the run, as is
membership of every iterate in the constraint body.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .dgbox import BoxInstance, double_greedy_box
from .polytope import CapParam, Polytope
from .setfn import (EstimatorConfig, Point, SetFunction, default_config,
                    max_singleton, multilinear, residual_gradient)

ENV_TOL = 1e-12
THETA_TOL = 1e-12


def default_theta_grid() -> tuple[float, ...]:
    """Multiples of 0.02 across [0, 1]; includes the tuned switch time 0.18."""
    return tuple(float(np.round(0.02 * i, 10)) for i in range(51))


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one solver run.

    ``delta`` must divide 1 so the time grid ends exactly at 1, and every
    theta must be a step-count multiple of delta; both are validated here
    rather than discovered as drift mid-run.
    """

    alpha: float = 0.5
    delta: float = 0.005
    theta_grid: tuple[float, ...] | None = None
    cfg: EstimatorConfig | None = None

    def __post_init__(self):
        if not (0.5 <= self.alpha <= 1.0):
            raise ConfigError(f"alpha must lie in [1/2, 1], got {self.alpha}")
        if not (0.0 < self.delta <= 1.0):
            raise ConfigError(f"delta must lie in (0, 1], got {self.delta}")
        total = round(1.0 / self.delta)
        if total < 1 or abs(total * self.delta - 1.0) > 1e-9:
            raise ConfigError(f"delta must divide the unit interval, got {self.delta}")
        if self.theta_grid is None:
            grid = default_theta_grid()
        else:
            grid = tuple(float(t) for t in self.theta_grid)
            if not grid:
                raise ConfigError("theta grid must not be empty")
        if list(grid) != sorted(set(grid)):
            raise ConfigError("theta grid must be strictly ascending")
        for t in grid:
            if not (0.0 <= t <= 1.0):
                raise ConfigError(f"theta {t} outside [0, 1]")
            k = round(t / self.delta)
            if abs(t - k * self.delta) > THETA_TOL:
                raise ConfigError(f"theta {t} is not a multiple of delta {self.delta}")
        object.__setattr__(self, "theta_grid", grid)

    @property
    def total_steps(self) -> int:
        return round(1.0 / self.delta)

    def steps_of(self, theta: float) -> int:
        k = round(theta / self.delta)
        if not (0.0 <= theta <= 1.0) or abs(theta - k * self.delta) > THETA_TOL:
            raise ConfigError(f"theta {theta} is not a multiple of delta {self.delta}")
        return k

    def resolve_cfg(self, f: SetFunction) -> EstimatorConfig:
        return self.cfg if self.cfg is not None else default_config(f)


@dataclass
class Trajectory:
    """Per-step record of one greedy stage: the time, the point the oracle
    direction was computed at, the direction, and the oracle objective
    <grad F(x) o (1-x), v>."""

    times: list[float] = field(default_factory=list)
    points: list[Point] = field(default_factory=list)
    directions: list[Point] = field(default_factory=list)
    inner_products: list[float] = field(default_factory=list)
    min_envelope_margin: float = np.inf

    def __len__(self) -> int:
        return len(self.times)


def _advance(f: SetFunction, C: Polytope, run: RunConfig, x: np.ndarray,
             first_step: int, last_step: int, cap_alpha: float,
             env_start: float, env_factor: float, stream_label: int):
    """Euler steps first_step..last_step-1 at cap cap_alpha; enforces the
    envelope (starting value env_start, per-step factor env_factor) and
    feasibility after every update."""
    cfg = run.resolve_cfg(f)
    cap = CapParam(cap_alpha)
    traj = Trajectory()
    env = env_start
    for j in range(first_step, last_step):
        cfg_j = cfg.substream(stream_label, j) if cfg.mode == "mc" else cfg
        g = residual_gradient(f, x, cfg_j)
        vp = C.linear_maximize(g, cap)
        traj.times.append(j * run.delta)
        traj.points.append(Point.trusted(x))
        traj.directions.append(vp)
        traj.inner_products.append(float(g @ vp.v))
        x = x + run.delta * vp.v * (1.0 - x)
        env *= env_factor
        margin = float(np.min((1.0 - x) - env))
        traj.min_envelope_margin = min(traj.min_envelope_margin, margin)
        if margin < -ENV_TOL:
            raise RuntimeError(
                f"l-inf envelope violated at step {j + 1} (margin {margin:.3e})")
        if not C.contains_point(x):
            raise RuntimeError(f"iterate left the constraint body at step {j + 1}")
    return x, traj


def dampened_stage(f: SetFunction, C: Polytope, run: RunConfig, theta: float):
    """Run the capped stage from 0 to time theta.

    Returns (x_theta, v_theta, trajectory) where v_theta is the capped oracle
    direction computed at the final point; the fallback branch bound needs it
    even though it is never applied as an update.
    """
    k = run.steps_of(theta)
    x0 = np.zeros(f.n)
    x, traj = _advance(f, C, run, x0, 0, k, run.alpha,
                       1.0, 1.0 - run.delta * run.alpha, k)
    g = residual_gradient(f, x, run.resolve_cfg(f))
    v_theta = C.linear_maximize(g, CapParam(run.alpha))
    return Point(x), v_theta, traj


def standard_stage(f: SetFunction, C: Polytope, run: RunConfig,
                   start: Point, theta: float):
    """Continue uncapped from x(theta) until time 1; returns (y1, trajectory)."""
    k = run.steps_of(theta)
    env_start = (1.0 - run.delta * run.alpha) ** k
    y, traj = _advance(f, C, run, start.v.copy(), k, run.total_steps, 1.0,
                       env_start, 1.0 - run.delta, k)
    return Point(y), traj


def dg_branch(f: SetFunction, C: Polytope, x_theta: Point,
              cfg: EstimatorConfig | None = None):
    """The fallback pair (p, z): p is the *uncapped* oracle direction at the
    capped-stage point (this asymmetry is deliberate), and z is the double
    greedy solution over the box [0, p].  z <= p, so z is feasible by
    down-closedness."""
    if cfg is None:
        cfg = default_config(f)
    g = residual_gradient(f, x_theta, cfg)
    p = C.linear_maximize(g, CapParam(1.0))
    box_cfg = cfg if cfg.mode != "mc" else default_config(f)
    z = double_greedy_box(BoxInstance(f, Point.zeros(f.n), p, box_cfg))
    return p, z


@dataclass
class ThetaResult:
    theta: float
    x_theta: Point
    x_value: float
    y1: Point
    y1_value: float
    p: Point
    z: Point
    z_value: float
    final_inner: float      # <grad F(x_theta) o (1-x_theta), v_theta>
    dampened_steps: int
    standard_steps: int
    dampened_margin: float  # worst slack of the stage-one envelope
    standard_margin: float


@dataclass(frozen=True)
class DiagnosticRecord:
    """One lower-bound check.  ``passed`` allows the discretization slack
    2*delta*n^3*M; ``passed_strict`` allows none."""

    name: str
    theta: float
    value: float
    bound: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.value >= self.bound - self.slack

    @property
    def passed_strict(self) -> bool:
        return self.value >= self.bound


@dataclass
class SolveReport:
    best: Point
    best_value: float
    best_theta: float | None
    best_branch: str
    per_theta: list[ThetaResult]
    diagnostics: list[DiagnosticRecord] = field(default_factory=list)


def bound_diagnostics(run: RunConfig, results: list[ThetaResult],
                      opt_value: float, scale_m: float, n: int) -> list[DiagnosticRecord]:
    """Per-theta lower bounds on both branches, given the true optimum.

    greedy branch:    F(y1) >= e^(theta-1) * ((1-theta) e^(-alpha theta) OPT
                                              + F(x_theta))
    fallback branch:  F(z)  >= (e^(-alpha theta) OPT - F(x_theta)
                                - <grad o (1-x), v_theta>) / (2 (1-alpha))

    Both are continuous-time statements; the discrete run earns them only up
    to a discretization error, covered by the slack 2*delta*n^3*M.
    """
    slack = 2.0 * run.delta * n**3 * scale_m
    a = run.alpha
    out = []
    for r in results:
        th = r.theta
        cg_bound = np.exp(th - 1.0) * ((1.0 - th) * np.exp(-a * th) * opt_value
                                       + r.x_value)
        out.append(DiagnosticRecord("greedy-stage-bound", th, r.y1_value,
                                    float(cg_bound), slack))
        if a < 1.0:
            dg_bound = (np.exp(-a * th) * opt_value - r.x_value - r.final_inner) \
                / (2.0 * (1.0 - a))
            out.append(DiagnosticRecord("fallback-stage-bound", th, r.z_value,
                                        float(dg_bound), slack))
    return out


def solve(f: SetFunction, C: Polytope, run: RunConfig | None = None,
          opt_value: float | None = None) -> SolveReport:
    """Sweep the theta grid, run both branches, and keep the best candidate.

    When the true integral optimum is supplied (desk-scale instances), the
    per-theta lower-bound diagnostics are evaluated and attached; they are
    recorded, not enforced.
    """
    if run is None:
        run = RunConfig()
    cfg = run.resolve_cfg(f)
    best = Point.zeros(f.n)
    best_value = multilinear(f, best, cfg)
    best_theta: float | None = None
    best_branch = "origin"
    per_theta: list[ThetaResult] = []
    for theta in run.theta_grid:
        x_theta, v_theta, dtraj = dampened_stage(f, C, run, theta)
        y1, straj = standard_stage(f, C, run, x_theta, theta)
        p, z = dg_branch(f, C, x_theta, cfg)
        x_value = multilinear(f, x_theta, cfg)
        y1_value = multilinear(f, y1, cfg)
        z_value = multilinear(f, z, cfg)
        final_inner = float(residual_gradient(f, x_theta, cfg) @ v_theta.v)
        if y1_value > best_value:
            best, best_value, best_theta, best_branch = y1, y1_value, theta, "greedy"
        if z_value > best_value:
            best, best_value, best_theta, best_branch = z, z_value, theta, "double-greedy"
        per_theta.append(ThetaResult(
            theta=theta, x_theta=x_theta, x_value=x_value,
            y1=y1, y1_value=y1_value, p=p, z=z, z_value=z_value,
            final_inner=final_inner,
            dampened_steps=len(dtraj), standard_steps=len(straj),
            dampened_margin=dtraj.min_envelope_margin,
            standard_margin=straj.min_envelope_margin))
    report = SolveReport(best, best_value, best_theta, best_branch, per_theta)
    if opt_value is not None:
        report.diagnostics = bound_diagnostics(run, per_theta, opt_value,
                                               max_singleton(f), f.n)
    return report
