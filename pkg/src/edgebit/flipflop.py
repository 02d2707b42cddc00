"""Closed-form model of a metastable 1-bit recorder.

Two particles on a line share an inverted parabolic energy hump plus a
quadratic coupling; the bit disagrees between its two readings when the
particles are detected on opposite sides of the origin.  Everything here is
analytic: time-dependent Gaussian widths along the rotated (u, v) axes, the
joint density they define, and the disagreement probability, which for an
on-edge start reduces to (2/pi) * arctan(B2/B1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

DIMENSIONLESS = "dimensionless"
PHYSICAL = "physical"

# Below this |lambda - 1| the oscillation rate is evaluated by series to
# keep the branch switch continuous.
LAMBDA_SERIES_CUTOFF = 1e-9


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested absolute error."""

    def __init__(self, achieved: float, required: float):
        self.achieved = achieved
        self.required = required
        super().__init__(
            f"quadrature error estimate {achieved:.3e} exceeds required {required:.3e}"
        )


@dataclass(frozen=True)
class UnitScales:
    """Conversion factors remembered by a dimensionless parameter set."""

    omega: float
    length: float
    m: float
    k: float
    hbar: float


@dataclass(frozen=True)
class FlipflopParams:
    """Physical or dimensionless parameters of the two-particle recorder model.

    In physical units the natural time is 1/omega with omega = sqrt(k/m) and
    the natural length is sqrt(hbar / (m * omega)); in dimensionless units
    m = k = hbar = 1 and b, c are measured in natural lengths.
    """

    lam: float
    b: float
    c: float = 0.0
    m: float = 1.0
    k: float = 1.0
    hbar: float = 1.0
    units: str = PHYSICAL
    scales: UnitScales | None = None

    def __post_init__(self):
        if self.m <= 0 or self.k <= 0 or self.hbar <= 0:
            raise ValueError("m, k, hbar must be positive")
        if self.b <= 0:
            raise ValueError("packet width b must be positive")
        if self.units not in (PHYSICAL, DIMENSIONLESS):
            raise ValueError(f"unknown units tag {self.units!r}")

    @property
    def omega(self) -> float:
        return math.sqrt(self.k / self.m)

    @property
    def length_scale(self) -> float:
        return math.sqrt(self.hbar / (self.m * self.omega))

    @property
    def hfac(self) -> float:
        """hbar^2 / (omega^2 m^2 b^4); reduces to 1/b^4 in dimensionless units."""
        return self.hbar**2 / (self.omega**2 * self.m**2 * self.b**4)

    @classmethod
    def dimensionless(cls, lam: float, b: float, c: float = 0.0) -> "FlipflopParams":
        return cls(lam=lam, b=b, c=c, units=DIMENSIONLESS)


def to_dimensionless(p: FlipflopParams) -> FlipflopParams:
    """Rescale to natural units, remembering the conversion factors."""
    if p.units == DIMENSIONLESS:
        return p
    ell = p.length_scale
    return FlipflopParams(
        lam=p.lam,
        b=p.b / ell,
        c=p.c / ell,
        units=DIMENSIONLESS,
        scales=UnitScales(omega=p.omega, length=ell, m=p.m, k=p.k, hbar=p.hbar),
    )


def to_physical(p: FlipflopParams) -> FlipflopParams:
    """Invert :func:`to_dimensionless` using the remembered scales."""
    if p.units == PHYSICAL:
        return p
    if p.scales is None:
        raise ValueError("dimensionless parameters carry no unit scales to restore")
    s = p.scales
    return FlipflopParams(
        lam=p.lam, b=p.b * s.length, c=p.c * s.length, m=s.m, k=s.k, hbar=s.hbar
    )


def s_lambda(lam: float, t):
    """Branch-unified squared oscillation factor.

    sin^2(sqrt(lam-1) t) / (lam-1) for lam > 1, t^2 at lam = 1, and
    sinh^2(sqrt(1-lam) t) / (1-lam) for lam < 1; continuous in lam.
    """
    t = np.asarray(t, dtype=float)
    eps = lam - 1.0
    if abs(eps) < LAMBDA_SERIES_CUTOFF:
        t2 = t * t
        out = t2 * (1.0 - eps * t2 / 3.0 + 2.0 * eps**2 * t2 * t2 / 45.0)
    elif eps > 0:
        out = np.sin(np.sqrt(eps) * t) ** 2 / eps
    else:
        out = np.sinh(np.sqrt(-eps) * t) ** 2 / (-eps)
    return out if out.ndim else float(out)


def b1_squared(b: float, t, hfac: float):
    """Squared width along the unstable u-axis: b^2 [1 + (hfac + 1) sinh^2 t]."""
    t = np.asarray(t, dtype=float)
    out = b * b * (1.0 + (hfac + 1.0) * np.sinh(t) ** 2)
    return out if out.ndim else float(out)


def b2_squared(b: float, lam: float, t, hfac: float):
    """Squared width along the coupled v-axis.

    Equals b^2 [1 + (hfac/(lam-1) - 1) sin^2(sqrt(lam-1) t)] for lam > 1 and
    continues through lam <= 1 via the unified oscillation factor.
    """
    t = np.asarray(t, dtype=float)
    out = np.asarray(b * b * (1.0 + (hfac - (lam - 1.0)) * s_lambda(lam, t)))
    return out if out.ndim else float(out)


def _dimensionless_view(p: FlipflopParams) -> tuple[float, float, float, float, float]:
    """(lam, b, c, hfac, time_factor): time_factor maps caller time to natural time."""
    if p.units == DIMENSIONLESS:
        return p.lam, p.b, p.c, p.hfac, 1.0
    ell = p.length_scale
    return p.lam, p.b / ell, p.c / ell, p.hfac, p.omega


def joint_density(x, y, t: float, p: FlipflopParams):
    """|psi(x, y, t)|^2, a Gaussian in the rotated coordinates.

    Accepts scalar or array x, y in the units of ``p``; returns the density
    in those same units (probability per area).
    """
    lam, b, c, hfac, tf = _dimensionless_view(p)
    ell = 1.0 if p.units == DIMENSIONLESS else p.length_scale
    tau = tf * t
    xs = np.asarray(x, dtype=float) / ell
    ys = np.asarray(y, dtype=float) / ell
    b1sq = b1_squared(b, tau, hfac)
    b2sq = b2_squared(b, lam, tau, hfac)
    u = (xs + ys) / math.sqrt(2.0)
    v = (xs - ys) / math.sqrt(2.0)
    center = c * math.sqrt(2.0) * math.cosh(tau)
    dens = np.exp(-((u - center) ** 2) / b1sq - v**2 / b2sq) / (
        math.pi * math.sqrt(b1sq * b2sq)
    )
    dens = dens / (ell * ell)
    return dens if dens.ndim else float(dens)


def disagreement_probability(t, p: FlipflopParams):
    """(2/pi) arctan(B2/B1): probability the two readings differ, on-edge start.

    The closed form holds only for c = 0; biased starts must go through
    :func:`quadrant_disagreement_numeric`.
    """
    if p.c != 0.0:
        raise ValueError(
            "closed form requires c = 0; use quadrant_disagreement_numeric for biased starts"
        )
    lam, b, _, hfac, tf = _dimensionless_view(p)
    tau = tf * np.asarray(t, dtype=float)
    ratio = b2_squared(b, lam, tau, hfac) / b1_squared(b, tau, hfac)
    out = (2.0 / math.pi) * np.arctan(np.sqrt(ratio))
    return out if out.ndim else float(out)


def quadrant_disagreement_numeric(
    t: float, p: FlipflopParams, abs_err: float = 1e-8
) -> float:
    """Mass of the joint density in the quadrants x*y < 0, by adaptive quadrature.

    The x*y < 0 region is |u| < |v| in rotated coordinates, so the u
    integral collapses to error functions and one adaptive 1-D integral
    over v remains.  Works for any bias c.
    """
    from scipy.special import erf

    lam, b, c, hfac, tf = _dimensionless_view(p)
    tau = tf * t
    b1 = math.sqrt(b1_squared(b, tau, hfac))
    b2 = math.sqrt(b2_squared(b, lam, tau, hfac))
    center = c * math.sqrt(2.0) * math.cosh(tau)

    def integrand(v: float) -> float:
        inner = 0.5 * (erf((v - center) / b1) + erf((v + center) / b1))
        return 2.0 / (math.sqrt(math.pi) * b2) * math.exp(-(v / b2) ** 2) * inner

    value, estimate = integrate.quad(integrand, 0.0, np.inf, epsabs=abs_err / 10)
    if estimate > abs_err:
        raise QuadratureError(estimate, abs_err)
    return float(value)


def classical_disagreement(t, lam: float, omega: float = 1.0):
    """hbar -> 0 limit of the disagreement probability.

    (2/pi) arctan(|cos(sqrt(lam-1) omega t)| / cosh(omega t)) for lam >= 1,
    with the hyperbolic continuation below lam = 1.
    """
    tau = omega * np.asarray(t, dtype=float)
    osc = np.clip(1.0 - (lam - 1.0) * s_lambda(lam, tau), 0.0, None)
    out = (2.0 / math.pi) * np.arctan(np.sqrt(osc) / np.cosh(tau))
    return out if out.ndim else float(out)


@dataclass
class DisagreementCurve:
    """Sampled disagreement-vs-time record with a units tag."""

    times: np.ndarray
    probabilities: np.ndarray
    units: str = DIMENSIONLESS

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        if self.times.shape != self.probabilities.shape or self.times.ndim != 1:
            raise ValueError("times and probabilities must be 1-D and equal length")
        if np.any(self.probabilities < 0) or np.any(self.probabilities > 1):
            raise ValueError("probabilities must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.times)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# units={self.units}\n")
            fh.write("t,probability\n")
            for t, pr in zip(self.times, self.probabilities):
                fh.write(f"{float(t)!r},{float(pr)!r}\n")

    @classmethod
    def read_csv(cls, path) -> "DisagreementCurve":
        path = Path(path)
        units = DIMENSIONLESS
        times: list[float] = []
        probs: list[float] = []
        with open(path) as fh:
            lines = fh.readlines()
        body_started = False
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                tag = line.lstrip("#").strip()
                if tag.startswith("units="):
                    units = tag.split("=", 1)[1]
                continue
            if not body_started:
                if line.replace(" ", "") != "t,probability":
                    raise ValueError(
                        f"{path}:{lineno}: expected header 't,probability', got {line!r}"
                    )
                body_started = True
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two fields, got {line!r}")
            try:
                t, pr = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if not 0.0 <= pr <= 1.0:
                raise ValueError(f"{path}:{lineno}: probability {pr} outside [0, 1]")
            times.append(t)
            probs.append(pr)
        if not body_started:
            raise ValueError(f"{path}: missing 't,probability' header")
        if not times:
            raise ValueError(f"{path}: no data rows")
        ts = np.asarray(times)
        if np.any(np.diff(ts) <= 0):
            raise ValueError(f"{path}: times are not strictly increasing")
        return cls(ts, np.asarray(probs), units=units)


def simulate_curve(
    p: FlipflopParams,
    t_max: float,
    dt: float,
    classical: bool = False,
    numeric: bool = False,
) -> DisagreementCurve:
    """Sample the disagreement probability on a uniform time grid."""
    if t_max < 0 or dt <= 0:
        raise ValueError("need t_max >= 0 and dt > 0")
    times = np.arange(0.0, t_max + dt / 2, dt)
    if classical:
        probs = classical_disagreement(times, p.lam, omega=p.omega if p.units == PHYSICAL else 1.0)
    elif numeric or p.c != 0.0:
        probs = np.array([quadrant_disagreement_numeric(t, p) for t in times])
    else:
        probs = disagreement_probability(times, p)
    return DisagreementCurve(times, np.atleast_1d(probs), units=p.units)


def local_maxima(values) -> list[int]:
    """Indices of interior three-point local maxima."""
    v = np.asarray(values, dtype=float)
    return [i for i in range(1, len(v) - 1) if v[i] > v[i - 1] and v[i] > v[i + 1]]


def oscillation_nodes(lam: float, t_max: float) -> np.ndarray:
    """Times k*pi/sqrt(lam-1) where the v-width returns to its minimum (lam > 1)."""
    if lam <= 1:
        raise ValueError("oscillation nodes exist only for lam > 1")
    period = math.pi / math.sqrt(lam - 1.0)
    return np.arange(0.0, t_max + 1e-12, period)
