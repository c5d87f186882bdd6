"""Correlation observables for weak monochromatic coherent-state inputs.

Coherent amplitudes cancel in every normalized quantity, so they only appear
as ``alpha_sq`` (the input photon flux |alpha|^2) in :func:`pair_rate` and
:func:`down_conversion_g2`.

Normalized observables divide by powers of the linear transmission. Near
critical coupling that transmission can vanish; when it drops below
``TRANSMISSION_FLOOR`` a :class:`~photon_scatter.exceptions.DivergenceError` is
raised carrying the unnormalized numerator.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import DivergenceError, ParameterError
from .params import CavityParams, ComplexSpectrum, complex_frequencies
from .smatrix import transmission

__all__ = [
    "TraceKind",
    "CorrelationTrace",
    "TRANSMISSION_FLOOR",
    "down_conversion_g2",
    "approx_down_conversion_g2",
    "pair_rate",
    "blockade_kernel",
    "blockade_g2",
    "nonlinear_phase",
    "two_mode_kernel",
    "zeta",
    "two_photon_wavefunction",
]

# |t|^2 below this makes g2-type ratios meaningless.
TRANSMISSION_FLOOR = 1e-30


class TraceKind(enum.Enum):
    DOWN_G2 = "down_g2"
    BLOCKADE_G2 = "blockade_g2"
    PHASE = "phase"
    ZETA = "zeta"
    WAVEFUNCTION = "wavefunction"
    PAIR_RATE = "pair_rate"
    WAVEPACKET_G2 = "wavepacket_g2"


_NON_NEGATIVE = {TraceKind.DOWN_G2, TraceKind.BLOCKADE_G2, TraceKind.ZETA,
                 TraceKind.PAIR_RATE, TraceKind.WAVEPACKET_G2}


@dataclass(frozen=True)
class CorrelationTrace:
    """An observable sampled along one axis (delay, detuning, ...).

    ``flags`` marks samples whose normalization diverged; those entries hold
    the unnormalized numerator instead of the ratio.
    """

    abscissa: np.ndarray
    values: np.ndarray
    kind: TraceKind
    params: CavityParams
    flags: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.abscissa, dtype=float)
        y = np.asarray(self.values)
        if x.shape != y.shape:
            raise ValueError("abscissa and values must have the same shape")
        if np.any(np.diff(x) < 0):
            raise ValueError("abscissa must be sorted")
        if self.kind in _NON_NEGATIVE and np.any(np.real(y) < 0):
            raise ValueError(f"{self.kind.value} values must be non-negative")
        if self.kind is TraceKind.PHASE and np.any((y <= -np.pi) | (y > np.pi)):
            raise ValueError("phase values must lie in (-pi, pi]")
        flags = np.zeros(x.shape, dtype=bool) if self.flags is None else np.asarray(self.flags, bool)
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "values", y)
        object.__setattr__(self, "flags", flags)

    @property
    def diverged(self):
        return bool(np.any(self.flags))


def _require(params, degenerate, what):
    if params.degenerate != degenerate:
        need = "a degenerate" if degenerate else "a non-degenerate"
        raise ParameterError(f"{what} needs {need} cavity")


def _spectrum(params, spectrum):
    return complex_frequencies(params) if spectrum is None else spectrum


def _two_sided_decay(tau, rate_after, rate_before):
    tau = np.asarray(tau, dtype=float)
    return np.where(tau >= 0, np.exp(-rate_after * np.abs(tau)), np.exp(-rate_before * np.abs(tau)))


def _down_conversion_prefactor(pair_modulus_sq, params, alpha_sq):
    if alpha_sq <= 0:
        raise ParameterError("alpha_sq (input flux |alpha|^2) must be positive")
    k1, k2, _ = params.kappa
    scale = 2 * alpha_sq * params.g ** 2 * (k1 + k2) * params.kappa_e[2]
    if scale == 0:
        raise DivergenceError("no down-conversion channel (g == 0 or kappa_e3 == 0)")
    return pair_modulus_sq / scale * (2 * k1 * k2 / (k1 + k2))


def down_conversion_g2(k, tau, params: CavityParams, alpha_sq=1.0,
                       spectrum: ComplexSpectrum | None = None):
    """Cross-correlation g2(tau) of down-converted a1/a2 photons for a pump at k.

    Positive tau means the a2 photon is detected later. Uses the exact dressed
    eigenvalues; see :func:`approx_down_conversion_g2` for the weak-coupling
    form.
    """
    _require(params, False, "down-conversion g2")
    spec = _spectrum(params, spectrum)
    pair = np.abs(spec.pair_denominator(np.asarray(k, dtype=float))) ** 2
    k1, k2, _ = params.kappa
    return _down_conversion_prefactor(pair, params, alpha_sq) * _two_sided_decay(tau, k2, k1)


def approx_down_conversion_g2(k, tau, params: CavityParams, alpha_sq=1.0):
    """Weak-coupling (g << kappa) version of :func:`down_conversion_g2`."""
    _require(params, False, "down-conversion g2")
    k = np.asarray(k, dtype=float)
    w1, w2, w3 = params.omega
    c1, c2, c3 = params.kappa
    pair = ((k - w1 - w2) ** 2 + ((c1 + c2) / 2) ** 2) * ((k - w3) ** 2 + (c3 / 2) ** 2)
    return _down_conversion_prefactor(pair, params, alpha_sq) * _two_sided_decay(tau, c2, c1)


def pair_rate(k, params: CavityParams, alpha_sq=1.0, spectrum: ComplexSpectrum | None = None):
    """Intra-cavity photon-pair generation rate for a pump of flux `alpha_sq` at k."""
    _require(params, False, "pair rate")
    spec = _spectrum(params, spectrum)
    c1, c2, _ = params.kappa
    pair = np.abs(spec.pair_denominator(np.asarray(k, dtype=float))) ** 2
    return alpha_sq * params.g ** 2 * (c1 + c2) * params.kappa_e[2] / pair


def blockade_kernel(k, tau, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Bound-state amplitude T(k, tau) for two a1 photons in a degenerate cavity.

    Even in tau; decays as ``exp(-kappa_1 |tau| / 2)``.
    """
    _require(params, True, "the blockade kernel")
    spec = _spectrum(params, spectrum)
    a1 = spec.alpha[0]
    k = np.asarray(k, dtype=float)
    lag = np.abs(np.asarray(tau, dtype=float))
    ke = params.kappa_e[0]
    den = spec.pair_denominator(2 * k) * (k - a1) ** 2
    return -2 * params.g ** 2 * ke * ke * np.exp(-1j * lag * (a1 - k)) / den


def _guard(weight, numerator, what):
    if np.any(weight < TRANSMISSION_FLOOR):
        raise DivergenceError(
            f"{what}: normalization divergent at critical coupling "
            f"(|t|^2 < {TRANSMISSION_FLOOR:g})",
            numerator=numerator,
        )


def two_photon_wavefunction(k, tau, params: CavityParams,
                            spectrum: ComplexSpectrum | None = None):
    """Stationary envelope ``t_k**2 + T(k, tau)`` of the transmitted photon pair.

    The full amplitude for detections at t and t + tau is this envelope times
    ``exp(-i k (2 t + tau))``.
    """
    spec = _spectrum(params, spectrum)
    t = transmission(k, params, 1, spec)
    return t * t + blockade_kernel(k, tau, params, spec)


def blockade_g2(k, tau, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Second-order self-correlation of transmitted a1 photons (degenerate cavity)."""
    _require(params, True, "blockade g2")
    spec = _spectrum(params, spectrum)
    t = transmission(k, params, 1, spec)
    t_sq = t * t
    numerator = np.abs(t_sq + blockade_kernel(k, tau, params, spec)) ** 2
    _guard(np.abs(t) ** 2, numerator, "blockade g2")
    return numerator / np.abs(t_sq) ** 2


def nonlinear_phase(k, tau, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Interaction-induced phase ``Arg(1 + T / t_k**2)`` in (-pi, pi]."""
    _require(params, True, "nonlinear phase")
    spec = _spectrum(params, spectrum)
    t = transmission(k, params, 1, spec)
    if np.any(t == 0):
        raise DivergenceError("nonlinear phase undefined: t_k == 0")
    phi = np.angle(1 + blockade_kernel(k, tau, params, spec) / (t * t))
    # np.angle can return -pi for a negative real with signed-zero imaginary part.
    return np.where(phi <= -np.pi, phi + 2 * np.pi, phi)


def two_mode_kernel(k1, k2, tau, params: CavityParams,
                    spectrum: ComplexSpectrum | None = None):
    """Bound-state amplitude for one a1 and one a2 photon (non-degenerate cavity).

    tau > 0 means the a2 photon arrives later; the amplitude then decays at
    kappa_2 / 2, and at kappa_1 / 2 for tau < 0.
    """
    _require(params, False, "the two-mode kernel")
    spec = _spectrum(params, spectrum)
    a1, a2, _ = spec.alpha
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    tau = np.asarray(tau, dtype=float)
    lag = np.abs(tau)
    ke1, ke2, _ = params.kappa_e
    amp = -params.g ** 2 * ke1 * ke2 / (spec.pair_denominator(k1 + k2) * (k1 - a1) * (k2 - a2))
    return amp * np.where(tau >= 0, np.exp(-1j * lag * (a2 - k2)), np.exp(-1j * lag * (a1 - k1)))


def zeta(k1, k2, tau, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Cauchy-Schwarz ratio ``G12 / sqrt(G11 G22)``; values above 1 are nonclassical.

    Two a1 photons (or two a2 photons) pass a non-degenerate cavity without
    interacting, so ``G11 = |t_k1|^4`` and ``G22 = |t_k2|^4``.
    """
    spec = _spectrum(params, spectrum)
    tt = transmission(k1, params, 1, spec) * transmission(k2, params, 2, spec)
    numerator = np.abs(tt + two_mode_kernel(k1, k2, tau, params, spec)) ** 2
    _guard(np.abs(tt) ** 2, numerator, "zeta")
    return numerator / np.abs(tt) ** 2
