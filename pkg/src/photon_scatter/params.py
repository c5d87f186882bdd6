"""Cavity parameters and the complex spectrum derived from them.

Frequencies and rates carry no fixed unit. The convention used throughout the
CLI and the test-suite is to measure everything in units of the intrinsic loss
rate of mode 1, so ``kappa_i[0] == 1``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

from .exceptions import ParameterError

__all__ = ["CavityParams", "ComplexSpectrum", "complex_frequencies"]


def _triple(name, value):
    try:
        out = tuple(float(v) for v in value)
    except TypeError:
        raise ParameterError(f"{name} must be a sequence of three numbers") from None
    if len(out) != 3:
        raise ParameterError(f"{name} must have exactly three entries, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ParameterError(f"{name} entries must be finite: {out}")
    return out


@dataclass(frozen=True)
class CavityParams:
    """Waveguide-coupled three-mode cavity.

    Parameters
    ----------
    omega : sequence of 3 floats
        Resonance frequencies of modes a1, a2, a3.
    kappa_e : sequence of 3 floats
        Cavity-waveguide coupling rates.
    kappa_i : sequence of 3 floats
        Intrinsic loss rates.
    g : float
        Trimodal coupling coefficient (real, non-negative).
    degenerate : bool
        Modes a1 and a2 are one and the same mode (second-harmonic type
        process). Mode-2 entries must then duplicate mode 1.
    """

    omega: tuple
    kappa_e: tuple
    kappa_i: tuple
    g: float
    degenerate: bool = False

    def __post_init__(self):
        omega = _triple("omega", self.omega)
        kappa_e = _triple("kappa_e", self.kappa_e)
        kappa_i = _triple("kappa_i", self.kappa_i)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "kappa_e", kappa_e)
        object.__setattr__(self, "kappa_i", kappa_i)
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "degenerate", bool(self.degenerate))

        if any(k < 0 for k in kappa_e + kappa_i):
            raise ParameterError("loss rates must be non-negative")
        for j in range(3):
            if kappa_e[j] + kappa_i[j] <= 0:
                raise ParameterError(
                    f"mode {j + 1} has zero total loss: its pole sits on the real "
                    "axis and the scattering formulas diverge on resonance"
                )
        if not math.isfinite(self.g) or self.g < 0:
            raise ParameterError(f"g must be finite and >= 0, got {self.g}")
        if self.degenerate and (
            omega[0] != omega[1] or kappa_e[0] != kappa_e[1] or kappa_i[0] != kappa_i[1]
        ):
            raise ParameterError(
                "degenerate=True requires identical omega, kappa_e and kappa_i "
                "for modes 1 and 2"
            )

    @classmethod
    def degenerate_cavity(cls, omega1, omega3, kappa_e1, kappa_i1, kappa_e3, kappa_i3, g):
        """Build a cavity whose modes a1 and a2 coincide."""
        return cls(
            omega=(omega1, omega1, omega3),
            kappa_e=(kappa_e1, kappa_e1, kappa_e3),
            kappa_i=(kappa_i1, kappa_i1, kappa_i3),
            g=g,
            degenerate=True,
        )

    @property
    def kappa(self):
        """Total loss rate of each mode."""
        return tuple(e + i for e, i in zip(self.kappa_e, self.kappa_i))

    def replace(self, **changes):
        return replace(self, **changes)

    def with_coupling_ratio(self, ratio, mode=1):
        """Set ``kappa_e = ratio * kappa_i`` for `mode` (both a1 and a2 when degenerate)."""
        kappa_e = list(self.kappa_e)
        idx = mode - 1
        kappa_e[idx] = ratio * self.kappa_i[idx]
        if self.degenerate and idx in (0, 1):
            kappa_e[0] = kappa_e[1] = ratio * self.kappa_i[0]
        return replace(self, kappa_e=tuple(kappa_e))

    def translated(self, shift1, shift2=None):
        """Shift omega1, omega2 by the given amounts and omega3 by their sum.

        Keeps the frequency-matching detuning ``omega1 + omega2 - omega3`` fixed.
        """
        if shift2 is None:
            shift2 = shift1
        if self.degenerate and shift1 != shift2:
            raise ParameterError("a degenerate cavity can only be translated rigidly")
        w1, w2, w3 = self.omega
        return replace(self, omega=(w1 + shift1, w2 + shift2, w3 + shift1 + shift2))


@dataclass(frozen=True)
class ComplexSpectrum:
    """Complex mode frequencies and the dressed two-photon eigenvalues.

    ``lam`` holds the eigenvalues of the effective Hamiltonian restricted to
    the {|110>, |001>} subspace (or {|20>, |01>} when degenerate).
    """

    alpha: tuple
    delta_alpha: complex
    lam: tuple

    def pair_denominator(self, x):
        """``(x - lam1) * (x - lam2)``, bitwise symmetric in the eigenvalue labels."""
        # Canonical factor order: vectorized complex products need not commute bitwise.
        l1, l2 = sorted(self.lam, key=lambda z: (z.real, z.imag))
        return (x - l1) * (x - l2)

    def relabeled(self):
        """Same spectrum with the two eigenvalues swapped."""
        return replace(self, lam=(self.lam[1], self.lam[0]))


def complex_frequencies(params: CavityParams) -> ComplexSpectrum:
    """Complex frequencies ``omega - i kappa / 2`` and dressed eigenvalues."""
    kappa = params.kappa
    alpha = tuple(complex(w, -k / 2) for w, k in zip(params.omega, kappa))
    a1, a2, a3 = alpha
    delta = a1 + a2 - a3
    g = params.g
    if params.degenerate:
        root = cmath.sqrt((2 * a1 - a3) ** 2 + 8 * g * g)
        centre = 2 * a1 + a3
    else:
        root = cmath.sqrt(delta * delta + 4 * g * g)
        centre = a1 + a2 + a3
    lam = (0.5 * centre + 0.5 * root, 0.5 * centre - 0.5 * root)
    return ComplexSpectrum(alpha=alpha, delta_alpha=delta, lam=lam)
