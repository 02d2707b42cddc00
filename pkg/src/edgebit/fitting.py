"""Least-squares recovery of (omega, lambda, b) from disagreement-vs-time records.

The objective wraps the closed-form disagreement probability; a coarse grid
over the parameter box seeds a derivative-free simplex refinement, which
sidesteps the branch switch at lambda = 1 and the oscillation-induced local
minima in lambda.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .flipflop import DisagreementCurve, b1_squared, b2_squared

MIN_POINTS = 4


def load_record_csv(path) -> DisagreementCurve:
    """Read a `t,probability` CSV record (strictly increasing times)."""
    return DisagreementCurve.read_csv(path)


@dataclass
class FitConfig:
    omega_bounds: tuple[float, float] = (0.2, 5.0)
    lambda_bounds: tuple[float, float] = (0.0, 4.0)
    b_bounds: tuple[float, float] = (0.05, 3.0)
    grid_seeds: int = 8  # per axis
    refine_top: int = 10  # simplex refinements, best seeds first
    tolerance: float = 1e-10  # simplex diameter for convergence
    max_iters: int = 4000
    fixed_omega: float | None = None

    def __post_init__(self):
        for name, (lo, hi) in (
            ("omega_bounds", self.omega_bounds),
            ("lambda_bounds", self.lambda_bounds),
            ("b_bounds", self.b_bounds),
        ):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be finite with min < max")
        if self.b_bounds[0] <= 0 or self.omega_bounds[0] <= 0:
            raise ValueError("omega and b bounds must be positive")
        if self.grid_seeds < 2:
            raise ValueError("grid_seeds must be at least 2")
        if self.refine_top < 1 or self.max_iters < 1:
            raise ValueError("refine_top and max_iters must be at least 1")
        if self.fixed_omega is not None and self.fixed_omega <= 0:
            raise ValueError("fixed_omega must be positive")


@dataclass
class FitResult:
    omega: float
    lam: float
    b: float
    objective: float
    residuals: list[float]
    converged: bool
    message: str = ""

    def to_json_dict(self) -> dict:
        return {
            "omega": self.omega,
            "lambda": self.lam,
            "b": self.b,
            "objective": self.objective,
            "residuals": [float(r) for r in self.residuals],
            "converged": self.converged,
            "message": self.message,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)


def model_curve(times, omega: float, lam: float, b: float) -> np.ndarray:
    """Closed-form disagreement probability at physical times, dimensionless b."""
    tau = omega * np.asarray(times, dtype=float)
    hfac = 1.0 / b**4
    ratio = b2_squared(b, lam, tau, hfac) / b1_squared(b, tau, hfac)
    return (2.0 / np.pi) * np.arctan(np.sqrt(ratio))


def residuals(params, data: DisagreementCurve) -> np.ndarray:
    omega, lam, b = params
    return model_curve(data.times, omega, lam, b) - data.probabilities


def objective(params, data: DisagreementCurve) -> float:
    """Sum of squared residuals; finite for any in-bounds parameters."""
    r = residuals(params, data)
    return float(r @ r)


@dataclass
class _Seed:
    value: float
    params: tuple[float, float, float] = field(default_factory=tuple)


def fit(data: DisagreementCurve, config: FitConfig | None = None) -> FitResult:
    """Grid-seeded simplex fit of (omega, lambda, b) to a record.

    When config.fixed_omega is set the search degrades to two parameters.
    Degenerate records (probabilities carrying no parameter information)
    return converged=False rather than a spurious optimum.
    """
    config = config or FitConfig()
    if len(data) < MIN_POINTS:
        raise ValueError(f"need at least {MIN_POINTS} data points, got {len(data)}")

    degenerate = float(np.ptp(data.probabilities)) < 1e-12

    ns = config.grid_seeds
    lam_grid = np.linspace(*config.lambda_bounds, ns)
    b_grid = np.linspace(*config.b_bounds, ns)
    if config.fixed_omega is not None:
        omega_grid = np.array([config.fixed_omega])
    else:
        omega_grid = np.linspace(*config.omega_bounds, ns)

    seeds = []
    for omega in omega_grid:
        for lam in lam_grid:
            for b in b_grid:
                p = (float(omega), float(lam), float(b))
                seeds.append(_Seed(objective(p, data), p))
    # deterministic reduction: lowest objective, ties by parameter order
    seeds.sort(key=lambda s: (s.value, s.params))

    if config.fixed_omega is None:
        bounds = [config.omega_bounds, config.lambda_bounds, config.b_bounds]
        x0s = [np.array(s.params) for s in seeds[: config.refine_top]]
        fun = lambda p: objective(p, data)  # noqa: E731
    else:
        bounds = [config.lambda_bounds, config.b_bounds]
        omega_fixed = config.fixed_omega
        x0s = [np.array(s.params[1:]) for s in seeds[: config.refine_top]]
        fun = lambda p: objective((omega_fixed, p[0], p[1]), data)  # noqa: E731

    best_x = None
    best_val = float("inf")
    best_ok = False
    for x0 in x0s:
        res = optimize.minimize(
            fun,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": config.tolerance,
                "fatol": config.tolerance**2,
                "maxiter": config.max_iters,
                "maxfev": config.max_iters,
            },
        )
        key = (res.fun, tuple(res.x))
        if key < (best_val, tuple(best_x) if best_x is not None else ()):
            best_val = float(res.fun)
            best_x = res.x
            best_ok = bool(res.success)

    if config.fixed_omega is None:
        omega, lam, b = (float(v) for v in best_x)
    else:
        omega = float(config.fixed_omega)
        lam, b = (float(v) for v in best_x)

    r = residuals((omega, lam, b), data)
    message = ""
    converged = best_ok
    if degenerate:
        converged = False
        message = "degenerate record: probabilities carry no parameter information"
    return FitResult(
        omega=omega,
        lam=lam,
        b=b,
        objective=float(r @ r),
        residuals=[float(v) for v in r],
        converged=converged,
        message=message,
    )
