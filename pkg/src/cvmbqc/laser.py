"""Spectral model of chopped pulse trains from amplitude-squeezed lasers.

Two phase-locked lasers with regularized pumping emit stationary light whose
y quadrature is squeezed.  Periodic apertures chop each beam into pulses of
duration T separated by gaps T0.  Inside one pulse the normally ordered
correlation of the squeezed quadrature decays exponentially on the cavity
timescale 1/kappa; distinct pulses and distinct lasers are uncorrelated.

The full spectral variance (vacuum included) of the squeezed quadrature at
frequency w is

    <|dy(w)|^2> = 1/4 + F[<: dy(t) dy(t') :>](w),

which for perfect synchronization (mu = 0) closes to w^2 / (4 (kappa^2 + w^2)).
The anti-squeezed x quadrature has no closed form here; it is modelled as a
minimum-uncertainty reciprocal times an optional excess-noise factor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.integrate import quad

from .quadrature import VACUUM_VARIANCE

#: Integration windows shorter than this many correlation times are rejected.
MIN_ORACLE_WINDOW = 20.0

#: Default integration window for the numeric Fourier oracle.
DEFAULT_ORACLE_WINDOW = 50.0


class DivergentAntisqueezingError(ValueError):
    """Raised where the minimum-uncertainty x variance diverges (y variance 0)."""


@dataclass(frozen=True)
class PulseTrain:
    """Chopped beam geometry and laser parameters.

    duration: pulse length T; gap: dark interval T0; kappa: cavity linewidth;
    mu: phase-locking strength (0 <= mu < 1).  Pulse m starts at
    m * (T + T0), 0-based.
    """

    duration: float
    gap: float
    n_pulses: int
    kappa: float
    mu: float = 0.0

    def __post_init__(self):
        if self.duration <= 0 or self.gap <= 0:
            raise ValueError("pulse duration and gap must be positive")
        if self.n_pulses < 1:
            raise ValueError("need at least one pulse")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if not 0.0 <= self.mu < 1.0:
            raise ValueError("mu must lie in [0, 1)")
        if self.kappa * self.duration < 10.0:
            warnings.warn(
                "kappa * T = %.3g: pulses are not long compared to the laser "
                "correlation time, the pulsed spectra lose accuracy" % (self.kappa * self.duration),
                stacklevel=2,
            )
        if self.mu > 0.1:
            warnings.warn(
                "mu = %.3g exceeds the weak-synchronization regime" % self.mu,
                stacklevel=2,
            )

    @property
    def period(self) -> float:
        return self.duration + self.gap

    def pulse_start(self, m: int) -> float:
        if not 0 <= m < self.n_pulses:
            raise ValueError(f"pulse index {m} out of range")
        return m * self.period

    def in_window(self, t: float, m: int) -> bool:
        t0 = self.pulse_start(m)
        return t0 <= t <= t0 + self.duration


def y_correlation(t: float, t_prime: float, m: int, m_prime: int,
                  train: PulseTrain, channel: int = 0, channel_prime: int = 0) -> float:
    """Normally ordered correlation of the squeezed quadrature.

    Same pulse, same laser:  -(kappa/8) * (1-mu)/(1-mu/2)
    * exp(-kappa (1-mu/2) |t-t'|) inside the pulse windows; zero otherwise.
    Distinct pulses and distinct lasers are exactly uncorrelated.
    """
    if m != m_prime or channel != channel_prime:
        return 0.0
    if not (train.in_window(t, m) and train.in_window(t_prime, m_prime)):
        return 0.0
    k, mu = train.kappa, train.mu
    rate = k * (1.0 - mu / 2.0)
    return -(k / 8.0) * ((1.0 - mu) / (1.0 - mu / 2.0)) * math.exp(-rate * abs(t - t_prime))


def y_spectral_variance(omega, kappa: float):
    """Closed-form squeezed-quadrature variance w^2 / (4 (kappa^2 + w^2)).

    Vacuum included; ranges over [0, 1/4), reaching 1/4 only asymptotically.
    Vectorized over ``omega``.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    w2 = np.square(omega)
    return w2 / (4.0 * (kappa * kappa + w2))


def y_spectral_variance_oracle(omega: float, kappa: float, mu: float = 0.0,
                               window: float | None = None) -> float:
    """Numeric Fourier transform of the correlation function plus vacuum.

    Integrates 1/4 + 2 * Integral_0^W C(tau) cos(w tau) dtau with C the
    stationary normally ordered correlation, using oscillatory-weight
    quadrature.  This is the independent check of the closed form (exact
    agreement is expected only at mu = 0).
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if not 0.0 <= mu < 1.0:
        raise ValueError("mu must lie in [0, 1)")
    W = DEFAULT_ORACLE_WINDOW / kappa if window is None else float(window)
    if W < MIN_ORACLE_WINDOW / kappa:
        raise ValueError(
            f"integration window {W:g} shorter than {MIN_ORACLE_WINDOW:g}/kappa")
    rate = kappa * (1.0 - mu / 2.0)
    amp = -(kappa / 8.0) * ((1.0 - mu) / (1.0 - mu / 2.0))

    def corr(tau):
        return amp * math.exp(-rate * tau)

    integral, _ = quad(corr, 0.0, W, weight="cos", wvar=float(omega),
                       epsabs=1e-14, epsrel=1e-13, limit=400)
    return VACUUM_VARIANCE + 2.0 * integral


@dataclass(frozen=True)
class XNoiseModel:
    """Model of the anti-squeezed quadrature: x = factor / (16 * y).

    factor = 1 is the minimum-uncertainty partner; factor > 1 adds excess
    noise in the stretched quadrature (which leaves every criterion and gate
    in this package unchanged).
    """

    factor: float = 1.0

    def __post_init__(self):
        if self.factor < 1.0:
            raise ValueError("excess-noise factor must be >= 1")

    @classmethod
    def minimum_uncertainty(cls) -> "XNoiseModel":
        return cls(1.0)

    @classmethod
    def excess_noise(cls, factor: float) -> "XNoiseModel":
        return cls(factor)

    @property
    def label(self) -> str:
        if self.factor == 1.0:
            return "minimum_uncertainty"
        return f"excess_noise({self.factor:g})"


def x_spectral_variance(omega, kappa: float,
                        model: XNoiseModel = XNoiseModel(1.0)):
    """Anti-squeezed quadrature variance factor / (16 * y_var(omega)).

    Diverges at omega = 0 where the squeezed variance vanishes; that case
    raises :class:`DivergentAntisqueezingError` rather than returning inf.
    """
    y = y_spectral_variance(omega, kappa)
    if np.any(np.asarray(y) == 0.0):
        raise DivergentAntisqueezingError(
            "x variance divergent at omega = 0 under the reciprocal model")
    return model.factor / (16.0 * y)


@dataclass(frozen=True)
class QuadratureSpectrum:
    """Paired squeezed/anti-squeezed spectra for one laser."""

    kappa: float
    model: XNoiseModel = field(default_factory=XNoiseModel)

    def y_var(self, omega):
        return y_spectral_variance(omega, self.kappa)

    def x_var(self, omega):
        return x_spectral_variance(omega, self.kappa, self.model)

    def four_y_var(self, omega):
        return 4.0 * self.y_var(omega)


@dataclass(frozen=True)
class SpectralGrid:
    """Discrete frequencies w_k = 2 pi k / (n (T + T0)) for integer k."""

    ks: tuple
    omegas: np.ndarray
    multiplicity: int
    period: float

    def __post_init__(self):
        object.__setattr__(self, "omegas", np.asarray(self.omegas, dtype=float))


def discrete_frequencies(train: PulseTrain, multiplicity: int,
                         k_range: Iterable[int]) -> SpectralGrid:
    """Build the discrete frequency grid; k = 0 is always included."""
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    requested = set(int(k) for k in k_range)
    if not requested:
        raise ValueError("empty k range")
    ks = sorted(requested | {0})
    base = 2.0 * math.pi / (multiplicity * train.period)
    omegas = np.array([base * k for k in ks])
    return SpectralGrid(tuple(ks), omegas, multiplicity, train.period)


@dataclass(frozen=True)
class WholePulseMode:
    """Zero-frequency temporal mode of one pulse: E(0) = integral of E(t) dt.

    This is the best-squeezed oscillator of the pulse; ideally its squeezed
    variance vanishes.  The discretized mode pair obeys [Q(-w_k), P(w_k)] =
    1/4, matching the single-quadrature normalization.
    """

    pulse: int
    channel: int
    omega: float = 0.0
    k: int = 0
    y_variance: float = 0.0
    commutator: float = 0.25

    def correlated_with(self, other: "WholePulseMode") -> bool:
        """Whole-pulse modes of distinct pulses or lasers are uncorrelated."""
        return self.pulse == other.pulse and self.channel == other.channel


def whole_pulse_mode(train: PulseTrain, m: int, channel: int) -> WholePulseMode:
    """Whole-pulse (k = 0) mode descriptor for pulse ``m`` of one laser."""
    if not 0 <= m < train.n_pulses:
        raise ValueError(f"pulse index {m} out of range")
    if channel not in (0, 1):
        raise ValueError("channel must be 0 or 1")
    return WholePulseMode(pulse=m, channel=channel,
                          y_variance=float(y_spectral_variance(0.0, train.kappa)))
