"""Closed-form momentum-space scattering matrices.

Every S-matrix element is a smooth coefficient multiplying a Dirac-delta
structure. Deltas are never discretised: functions here return only the
coefficient, and :class:`DeltaSupport` names the structure it belongs to.

All functions accept scalar or array momenta and broadcast with numpy rules.
An optional precomputed :class:`~photon_scatter.params.ComplexSpectrum` may be
passed to avoid recomputing it inside tight loops.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import ManifoldError, ParameterError
from .params import CavityParams, ComplexSpectrum, complex_frequencies

__all__ = [
    "DeltaSupport",
    "S22Terms",
    "transmission",
    "three_point_green",
    "two_to_one_amplitude",
    "one_to_two_amplitude",
    "two_photon_kernel",
    "full_s22",
    "bound_state_amplitude",
    "MANIFOLD_RTOL",
]

SQRT_2PI = np.sqrt(2 * np.pi)
MANIFOLD_RTOL = 1e-9


class DeltaSupport(enum.Enum):
    """Delta-function structure attached to an S-matrix coefficient."""

    DIAGONAL = "delta(p1-k1) delta(p2-k2)"
    EXCHANGE = "delta(p1-k2) delta(p2-k1)"
    MANIFOLD = "delta(p1+p2-k1-k2)"


@dataclass(frozen=True)
class S22Terms:
    """Two-to-two S-matrix split into its interaction-free and bound parts.

    ``coherent`` multiplies every delta pair listed in ``coherent_support``;
    ``bound`` multiplies the single energy-conservation delta.
    """

    coherent: complex
    bound: complex
    coherent_support: tuple
    bound_support: DeltaSupport = DeltaSupport.MANIFOLD


def _spectrum(params, spectrum):
    return complex_frequencies(params) if spectrum is None else spectrum


def transmission(k, params: CavityParams, mode=1, spectrum: ComplexSpectrum | None = None):
    """Single-photon transmission coefficient ``t_k = 1 - i kappa_e / (k - alpha)``.

    Parameters
    ----------
    k : float or array_like
        Photon frequency.
    params : CavityParams
    mode : {1, 2, 3}
        Resonance the photon is near.
    spectrum : ComplexSpectrum, optional
    """
    if mode not in (1, 2, 3):
        raise ParameterError(f"mode must be 1, 2 or 3, got {mode!r}")
    spec = _spectrum(params, spectrum)
    alpha = spec.alpha[mode - 1]
    return 1 - 1j * params.kappa_e[mode - 1] / (np.asarray(k) - alpha)


def three_point_green(k1, k2, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Coefficient of ``delta(p3 - k1 - k2)`` in the momentum-space G(p3; k1, k2)."""
    spec = _spectrum(params, spectrum)
    a1, a2, _ = spec.alpha
    k1 = np.asarray(k1)
    k2 = np.asarray(k2)
    total = k1 + k2
    if params.degenerate:
        pref = -2 * params.g / SQRT_2PI
        a2 = a1
    else:
        pref = -params.g / SQRT_2PI
    return pref * (total - a1 - a2) / ((k1 - a1) * (k2 - a2) * spec.pair_denominator(total))


def two_to_one_amplitude(k1, k2, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Sum-frequency amplitude: coefficient of ``delta(p3 - k1 - k2)`` in S_{p3;k1k2}.

    Degenerate cavities use ``kappa_e1**2 kappa_e3`` under the square root and
    carry the extra factor 2 inside :func:`three_point_green`.
    """
    ke1, ke2, ke3 = params.kappa_e
    if params.degenerate:
        ke2 = ke1
    return 1j * np.sqrt(ke1 * ke2 * ke3) * three_point_green(k1, k2, params, spectrum)


def one_to_two_amplitude(k1, k2, params: CavityParams, spectrum: ComplexSpectrum | None = None):
    """Down-conversion amplitude S_{k1k2;p3}; equal to the sum-frequency one."""
    return two_to_one_amplitude(k1, k2, params, spectrum)


def _check_manifold(p1, p2, k1, k2):
    p1, p2, k1, k2 = np.broadcast_arrays(p1, p2, k1, k2)
    scale = np.maximum.reduce([np.abs(p1), np.abs(p2), np.abs(k1), np.abs(k2)])
    bad = np.abs((p1 + p2) - (k1 + k2)) > MANIFOLD_RTOL * scale
    if np.any(bad):
        idx = np.flatnonzero(bad.ravel())[0]
        q1, q2, r1, r2 = (float(a.ravel()[idx]) for a in (p1, p2, k1, k2))
        raise ManifoldError(
            f"p1 + p2 != k1 + k2 (p1={q1!r}, p2={q2!r}, k1={r1!r}, k2={r2!r}); "
            "pass p2 = k1 + k2 - p1"
        )


def two_photon_kernel(p1, p2, k1, k2, params: CavityParams,
                      spectrum: ComplexSpectrum | None = None):
    """Interaction kernel M(p1, p2, k1, k2) of the connected two-photon Green's function.

    Only defined on ``p1 + p2 == k1 + k2``; anything else raises
    :class:`ManifoldError`.
    """
    _check_manifold(p1, p2, k1, k2)
    spec = _spectrum(params, spectrum)
    a1, a2, _ = spec.alpha
    p1, p2, k1, k2 = (np.asarray(x) for x in (p1, p2, k1, k2))
    total = k1 + k2
    g2 = params.g ** 2
    if params.degenerate:
        pref = -2j * g2 / np.pi
        a2 = a1
    else:
        pref = -1j * g2 / (2 * np.pi)
    den = (k1 - a1) * (k2 - a2) * (p1 - a1) * (p2 - a2) * spec.pair_denominator(total)
    return pref * (total - a1 - a2) / den


def full_s22(p1, p2, k1, k2, params: CavityParams,
             spectrum: ComplexSpectrum | None = None) -> S22Terms:
    """Two-to-two S-matrix: ``t_k1 t_k2`` on the delta pairs plus ``kappa_e^2 M`` on the manifold."""
    spec = _spectrum(params, spectrum)
    bound = two_photon_kernel(p1, p2, k1, k2, params, spec)
    ke1, ke2, _ = params.kappa_e
    if params.degenerate:
        t1 = transmission(k1, params, 1, spec)
        t2 = transmission(k2, params, 1, spec)
        support = (DeltaSupport.DIAGONAL, DeltaSupport.EXCHANGE)
        ke2 = ke1
    else:
        t1 = transmission(k1, params, 1, spec)
        t2 = transmission(k2, params, 2, spec)
        support = (DeltaSupport.DIAGONAL,)
    return S22Terms(coherent=t1 * t2, bound=ke1 * ke2 * bound, coherent_support=support)


def bound_state_amplitude(k1, k2, tau, params: CavityParams,
                          spectrum: ComplexSpectrum | None = None):
    """Time-domain bound-state amplitude obtained by contracting the kernel.

    Integrates ``kappa_e1 kappa_e2 M(p, k1 + k2 - p, k1, k2) exp(i (p - k1) tau)``
    over p by residues (closing above for tau > 0, below for tau < 0). The
    result multiplies the carrier ``exp(-i k1 t - i k2 (t + tau))`` of a pair
    detected at times t and t + tau. For a degenerate cavity the Fock-state
    factor 1/2 is included; the kernel is symmetric, so exchange of k1 and k2
    needs no extra bookkeeping here.
    """
    spec = _spectrum(params, spectrum)
    a1, a2, _ = spec.alpha
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    tau = np.asarray(tau, dtype=float)
    ke1, ke2, _ = params.kappa_e
    if params.degenerate:
        a2 = a1
        weight = 0.5 * ke1 * ke1
    else:
        weight = ke1 * ke2
    # M with its p-dependence stripped: sample on the diagonal point p = k.
    smooth = two_photon_kernel(k1, k2, k1, k2, params, spec) * (k1 - a1) * (k2 - a2)
    total = k1 + k2
    # Written with |tau| so neither branch overflows before np.where selects.
    lag = np.abs(tau)
    phase = np.where(tau >= 0, np.exp(-1j * lag * (a2 - k2)), np.exp(-1j * lag * (a1 - k1)))
    return weight * smooth * (-2j * np.pi / (total - a1 - a2)) * phase
