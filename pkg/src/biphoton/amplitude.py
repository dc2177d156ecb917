"""Biphoton angular wave function and its Gaussian model.

Angles follow the diametric convention: alpha1 is measured from +x and
alpha2 from -x, so a back-to-back pair has alpha1 == alpha2 and the pump
transverse momentum is proportional to the *difference* of the projected
unit vectors. All amplitudes are peak-normalized (value 1 on the cone at
equal azimuths); an L2 quadrature norm is available separately.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .crystal import DerivedScales, ExperimentConfig
from .errors import ConfigError, DegenerateGeometryError, RegimeError

# Best-fit Gaussian replacement constant for sinc^2(x); the published
# alternative 0.395 is selectable for compatibility.
SINC_GAUSS_FITTED = 0.359
SINC_GAUSS_PUBLISHED = 0.395

CLAMP_TOL = 1e-12  # |cos alpha_p| may exceed 1 by rounding; clamp within this

# Half-widths (in sigmas) of the default evaluation windows; truncated
# Gaussian mass < 1e-14.
GRID_SIGMAS = 8.0


class GeometryMode(Enum):
    EXACT = "exact"
    SMALL_ANGLE = "small_angle"


class AzimuthMode(Enum):
    EXACT = "exact"
    LINEARIZED = "linearized"


class AmplitudeKind(Enum):
    FULL = "full"
    NWO = "nwo"
    DOUBLE_GAUSSIAN = "double_gaussian"


@dataclass(frozen=True)
class AngularPair:
    """Spherical angles of the two photons in free space after the crystal.

    theta1/theta2 are polar angles in [0, pi]; alpha1 is azimuthal from the
    +x axis, alpha2 from the -x axis (diametric convention). The physical
    state lives on alpha0 = (alpha1+alpha2)/2 in (-pi/2, pi/2]; that range
    is a domain convention, not a formula restriction, because particle
    transposition must be accompanied by shifting both alphas by pi and
    therefore leaves the window. Arrays are accepted elementwise.
    """

    theta1: float | np.ndarray
    theta2: float | np.ndarray
    alpha1: float | np.ndarray
    alpha2: float | np.ndarray

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            th = np.asarray(getattr(self, name), dtype=float)
            if np.any(th < 0.0) or np.any(th > math.pi):
                raise ConfigError(f"{name} must lie in [0, pi]")

    @property
    def alpha0(self):
        return 0.5 * (np.asarray(self.alpha1) + np.asarray(self.alpha2))

    @property
    def alpha_diff(self):
        return np.asarray(self.alpha1) - np.asarray(self.alpha2)

    def transposed(self) -> "AngularPair":
        """Particle transposition with the compensating pi shift of both
        azimuths, the symmetry operation of the diametric convention."""
        return AngularPair(
            theta1=self.theta2,
            theta2=self.theta1,
            alpha1=np.asarray(self.alpha2) + math.pi,
            alpha2=np.asarray(self.alpha1) + math.pi,
        )


@dataclass(frozen=True)
class AmplitudeModel:
    """Amplitude selector bound to one set of derived scales.

    FULL and DOUBLE_GAUSSIAN share the same pump Gaussian factor; NWO is
    FULL with the walk-off slope forced to zero.
    """

    kind: AmplitudeKind
    scales: DerivedScales
    gauss_constant: float = SINC_GAUSS_FITTED

    def without_walkoff(self) -> "AmplitudeModel":
        return replace(self, scales=replace(self.scales, zeta=0.0))


def transverse_sum_diff(
    pair: AngularPair, lambda_p: float, mode: GeometryMode = GeometryMode.EXACT
):
    """Squared magnitudes (|k1+k2|^2, |k1-k2|^2) of the transverse wave
    vectors, um^-2.

    EXACT uses the spherical-angle expression; SMALL_ANGLE the leading
    order in the deviations from the cone, with the cone angle taken from
    the polar angles themselves ((theta1+theta2)/2 plays theta0's role in
    the azimuthal term).
    """
    th1 = np.asarray(pair.theta1, dtype=float)
    th2 = np.asarray(pair.theta2, dtype=float)
    dal = pair.alpha_diff
    pref = math.pi**2 / lambda_p**2
    if mode is GeometryMode.EXACT:
        s1, s2 = np.sin(th1), np.sin(th2)
        cross = 2.0 * s1 * s2 * np.cos(dal)
        base = s1 * s1 + s2 * s2
        sum_sq = pref * (base - cross)
        diff_sq = pref * (base + cross)
    else:
        t0 = 0.5 * (th1 + th2)
        az = t0 * t0 * dal * dal
        sum_sq = pref * ((th1 - th2) ** 2 + az)
        diff_sq = pref * ((th1 + th2) ** 2 - az)
    return sum_sq, diff_sq


def pump_polar_angle(pair: AngularPair, lambda_p: float, n_p: float):
    """Pump polar angle inside the crystal from tangential-momentum
    continuity: phi_p = (lambda_p / 2 pi n_p) |k1+k2|."""
    sum_sq, _ = transverse_sum_diff(pair, lambda_p, GeometryMode.EXACT)
    return lambda_p / (2.0 * math.pi * n_p) * np.sqrt(sum_sq)


def pump_azimuth_cos(
    pair: AngularPair,
    mode: AzimuthMode = AzimuthMode.EXACT,
    theta0: float | None = None,
):
    """cos(alpha_p) of the pump transverse momentum, clamped to [-1, 1].

    EXACT projects the momentum-conservation identity; LINEARIZED keeps
    the leading order in (theta1-theta2) and (alpha1-alpha2) and needs the
    cone angle. Raises DegenerateGeometryError for an exactly back-to-back
    pair (zero denominator); amplitude evaluation never hits this because
    the multiplying phi_p vanishes there as well.
    """
    th1 = np.asarray(pair.theta1, dtype=float)
    th2 = np.asarray(pair.theta2, dtype=float)
    a1 = np.asarray(pair.alpha1, dtype=float)
    a2 = np.asarray(pair.alpha2, dtype=float)
    if mode is AzimuthMode.EXACT:
        s1, s2 = np.sin(th1), np.sin(th2)
        num = s1 * np.cos(a1) - s2 * np.cos(a2)
        den_sq = s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * np.cos(a1 - a2)
    else:
        if theta0 is None:
            raise ConfigError("LINEARIZED mode needs the cone angle theta0")
        al0 = 0.5 * (a1 + a2)
        dal = a1 - a2
        num = (th1 - th2) * np.cos(al0) - theta0 * np.sin(al0) * dal
        den_sq = (th1 - th2) ** 2 + theta0**2 * dal**2
    if np.any(den_sq <= 0.0):
        raise DegenerateGeometryError(
            "back-to-back pair: pump transverse momentum is zero, "
            "its azimuth is undefined"
        )
    out = num / np.sqrt(den_sq)
    if np.any(np.abs(out) > 1.0 + CLAMP_TOL):
        raise DegenerateGeometryError(
            f"cos(alpha_p) = {float(np.max(np.abs(out))):.6g} exceeds 1 beyond "
            "rounding tolerance"
        )
    return np.clip(out, -1.0, 1.0)


def phase_mismatch(pair: AngularPair, scales: DerivedScales, include_walkoff: bool):
    """Linearized longitudinal phase mismatch Delta, um^-1.

    Without walk-off this is the linear-in-polar-angles form
    (pi / n_o lambda_p) theta0 (theta1 + theta2 - 2 theta0); with walk-off
    the linearized anisotropy contribution is added.
    """
    th1 = np.asarray(pair.theta1, dtype=float)
    th2 = np.asarray(pair.theta2, dtype=float)
    lam = scales.lambda_p
    t0 = scales.theta0
    delta = math.pi / (scales.n_o * lam) * t0 * (th1 + th2 - 2.0 * t0)
    if include_walkoff:
        al0 = pair.alpha0
        delta = delta - (math.pi * scales.zeta / (lam * scales.n_p0)) * (
            np.cos(al0) * (th1 - th2) - t0 * np.sin(al0) * pair.alpha_diff
        )
    return delta


def _sinc_argument(pair: AngularPair, scales: DerivedScales, walkoff: bool):
    # L * Delta / 2 expressed through dtheta_L
    th1 = np.asarray(pair.theta1, dtype=float)
    th2 = np.asarray(pair.theta2, dtype=float)
    t0 = scales.theta0
    core = t0 * (th1 + th2 - 2.0 * t0)
    if walkoff:
        al0 = pair.alpha0
        core = core - (scales.n_o / scales.n_p0) * scales.zeta * (
            np.cos(al0) * (th1 - th2) - t0 * np.sin(al0) * pair.alpha_diff
        )
    return core / (2.0 * scales.dtheta_L)


def _pump_gaussian_exponent(pair: AngularPair, scales: DerivedScales):
    th1 = np.asarray(pair.theta1, dtype=float)
    th2 = np.asarray(pair.theta2, dtype=float)
    t0 = scales.theta0
    return ((th1 - th2) ** 2 + t0 * t0 * pair.alpha_diff**2) / (
        2.0 * scales.dtheta_p**2
    )


def amplitude(model: AmplitudeModel, pair: AngularPair):
    """Real, peak-normalized biphoton amplitude.

    FULL: pump Gaussian times sinc of the walk-off-inclusive mismatch;
    NWO: same with zeta = 0; DOUBLE_GAUSSIAN: square root of the modeled
    density (so that density == amplitude^2 for every kind).
    """
    if model.kind is AmplitudeKind.DOUBLE_GAUSSIAN:
        return np.sqrt(probability_density(model, pair))
    walkoff = model.kind is AmplitudeKind.FULL
    g = _pump_gaussian_exponent(pair, model.scales)
    x = _sinc_argument(pair, model.scales, walkoff)
    return np.exp(-g) * np.sinc(x / math.pi)


def probability_density(model: AmplitudeModel, pair: AngularPair):
    """Peak-normalized probability density.

    DOUBLE_GAUSSIAN replaces sinc^2 by exp(-c x^2) with the fitted constant
    (or the published 0.395 when selected); other kinds square the amplitude.
    """
    if model.kind is not AmplitudeKind.DOUBLE_GAUSSIAN:
        return amplitude(model, pair) ** 2
    g = _pump_gaussian_exponent(pair, model.scales)
    x = _sinc_argument(pair, model.scales, walkoff=True)
    return np.exp(-2.0 * g) * np.exp(-model.gauss_constant * x * x)


def sinc_gauss_fit(
    fit_range: float = math.pi, grid_size: int = 2001, target=None
) -> tuple[float, float]:
    """Least-squares fit of exp(-c x^2) to sinc^2(x) on a uniform grid over
    [-fit_range, fit_range].

    Args:
        target: optional callable replacing sinc^2 as the fitted function
            (useful for self-consistency checks).

    Returns:
        (c, residual) with residual the root-mean-square misfit.
    """
    from scipy.optimize import least_squares

    if grid_size < 64:
        raise ConfigError(f"grid_size must be >= 64, got {grid_size}")
    x = np.linspace(-fit_range, fit_range, grid_size)
    target = np.sinc(x / math.pi) ** 2 if target is None else target(x)
    sol = least_squares(lambda c: np.exp(-c[0] * x * x) - target, x0=[0.35])
    c = float(sol.x[0])
    resid = float(np.sqrt(np.mean((np.exp(-c * x * x) - target) ** 2)))
    return c, resid


def default_windows(scales: DerivedScales, sigmas: float = GRID_SIGMAS):
    """Evaluation windows: theta around the cone and azimuthal difference.

    Returns ((theta_lo, theta_hi), (dalpha_lo, dalpha_hi)). The polar
    window covers both the sinc ridge (width dtheta_L/theta0 in each
    polar angle) and the pump Gaussian (width dtheta_p).
    """
    t0 = scales.theta0
    half_t = sigmas * max(scales.dtheta_L / t0, scales.dtheta_p)
    half_a = sigmas * scales.dtheta_p / t0
    return (t0 - half_t, t0 + half_t), (-half_a, half_a)


def l2_norm(model: AmplitudeModel, n: int = 96, sigmas: float = GRID_SIGMAS) -> float:
    """Quadrature L2 norm of the peak-normalized amplitude over the default
    windows (theta1, theta2, alpha1 - alpha2), at fixed alpha0 = 0, times
    the sqrt of the alpha0 extent pi."""
    (tlo, thi), (alo, ahi) = default_windows(model.scales, sigmas)
    th = np.linspace(tlo, thi, n)
    da = np.linspace(alo, ahi, n)
    T1, T2, DA = np.meshgrid(th, th, da, indexing="ij")
    pair = AngularPair(theta1=T1, theta2=T2, alpha1=0.5 * DA, alpha2=-0.5 * DA)
    dens = probability_density(model, pair)
    dt = th[1] - th[0]
    dal = da[1] - da[0]
    return float(np.sqrt(dens.sum() * dt * dt * dal * math.pi))


@dataclass(frozen=True)
class ValidityReport:
    """Dimensionless validity diagnostics of the linearized amplitude."""

    diffraction_ratio: float  # L / (8 n_o L_D)
    linearization_ratio: float  # n_o lambda_p / (pi L theta0^2)
    length_threshold_um: float  # n_o lambda_p / (pi theta0^2)
    diffraction_ok: bool
    linearization_ok: bool
    length_ok: bool

    WARN_THRESHOLD = 0.1

    def to_dict(self) -> dict:
        return {
            "L_over_8_no_LD": self.diffraction_ratio,
            "no_lambda_over_pi_L_theta0_sq": self.linearization_ratio,
            "L_threshold_um": self.length_threshold_um,
            "flags": {
                "L_over_8_no_LD": "pass" if self.diffraction_ok else "warn",
                "no_lambda_over_pi_L_theta0_sq": (
                    "pass" if self.linearization_ok else "warn"
                ),
                "L_threshold_um": "pass" if self.length_ok else "warn",
            },
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def validity_report(config: ExperimentConfig, scales: DerivedScales) -> ValidityReport:
    """Check the approximations behind the linearized amplitude.

    Raises:
        RegimeError: if theta0 == 0 (collinear regime, linearization
            impossible).
    """
    if scales.theta0 == 0.0:
        raise RegimeError("collinear regime: linearization impossible")
    rayleigh = math.pi * config.w**2 / config.lambda_p
    diffraction = config.L / (8.0 * scales.n_o * rayleigh)
    linearization = scales.n_o * config.lambda_p / (
        math.pi * config.L * scales.theta0**2
    )
    threshold = scales.n_o * config.lambda_p / (math.pi * scales.theta0**2)
    warn = ValidityReport.WARN_THRESHOLD
    return ValidityReport(
        diffraction_ratio=diffraction,
        linearization_ratio=linearization,
        length_threshold_um=threshold,
        diffraction_ok=diffraction < warn,
        linearization_ok=linearization < warn,
        length_ok=threshold / config.L < warn,
    )


def export_grid_csv(
    path: str | Path,
    model: AmplitudeModel,
    theta: np.ndarray,
    dalpha: np.ndarray,
    alpha0: float = 0.0,
) -> None:
    """Write the density over a (theta1, theta2, alpha1-alpha2) grid as CSV
    with columns theta1,theta2,alpha1,alpha2,value (radians, peak-normalized)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta1", "theta2", "alpha1", "alpha2", "value"])
        for t1 in theta:
            for t2 in theta:
                a1 = alpha0 + 0.5 * dalpha
                a2 = alpha0 - 0.5 * dalpha
                pair = AngularPair(
                    theta1=np.full_like(dalpha, t1),
                    theta2=np.full_like(dalpha, t2),
                    alpha1=a1,
                    alpha2=a2,
                )
                vals = np.atleast_1d(probability_density(model, pair))
                for j in range(len(dalpha)):
                    writer.writerow(
                        [f"{t1:.12g}", f"{t2:.12g}", f"{a1[j]:.12g}",
                         f"{a2[j]:.12g}", f"{vals[j]:.12g}"]
                    )
