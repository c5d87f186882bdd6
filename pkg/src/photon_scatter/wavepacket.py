"""Finite-bandwidth corrections for single-mode (a1) wavepacket inputs.

A weak coherent wavepacket ``a = int dk f(k) a_k`` with real spectral
amplitude f, normalized so that ``int |f|^2 dk = 1``. For the Lorentzian
amplitude

    f(k) = sqrt(2 / (pi gamma)) gamma^2 / ((k - k0)^2 + gamma^2)

the transmitted amplitude and the bound-state kernel have closed forms (the
contour integrals pick up the pole at ``k0 + i gamma``). Tabulated spectra are
handled numerically; the same numerical routines act as the oracle for the
Lorentzian closed forms.

The wavepacket is taken long enough that its temporal envelope is ignored:
the first detection time is fixed at t = 0.
"""
from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .exceptions import DivergenceError, ParameterError
from .observables import TRANSMISSION_FLOOR
from .params import CavityParams, ComplexSpectrum, complex_frequencies
from .smatrix import bound_state_amplitude, transmission

__all__ = [
    "SpectrumKind",
    "WavepacketSpec",
    "QuadResult",
    "TruncationWarning",
    "read_spectrum",
    "wavepacket_transmission",
    "wavepacket_kernel",
    "wavepacket_g2",
    "transmission_quad",
    "kernel_quad",
]

WINDOW_WIDTHS = 50.0
# Below this relative pole separation the regrouped closed form is used.
DOUBLE_POLE_RTOL = 1e-4


class SpectrumKind(enum.Enum):
    LORENTZIAN = "lorentzian"
    TABULATED = "tabulated"


class TruncationWarning(UserWarning):
    """A tabulated spectrum is cut off while still carrying weight."""


class QuadResult(NamedTuple):
    value: complex
    error: float


def _piecewise_linear_norm(k, f):
    h = np.diff(k)
    a, b = f[:-1], f[1:]
    return float(np.sum(h * (a * a + a * b + b * b) / 3))


@dataclass(frozen=True, eq=False)
class WavepacketSpec:
    """Spectral amplitude of the input wavepacket.

    Build one with :meth:`lorentzian`, :meth:`tabulated` or :meth:`from_file`.
    Tabulated amplitudes are linearly interpolated (first-order accurate) and
    vanish outside the table.
    """

    kind: SpectrumKind
    k0: float
    gamma: float | None = None
    samples: tuple | None = None

    @classmethod
    def lorentzian(cls, k0, gamma):
        if not gamma > 0:
            raise ParameterError(f"Lorentzian half-width must be positive, got {gamma}")
        return cls(SpectrumKind.LORENTZIAN, float(k0), gamma=float(gamma))

    @classmethod
    def tabulated(cls, k, f, normalize=True, edge_tol=1e-3):
        """Spectrum from samples of a real amplitude f(k).

        With ``normalize`` the table is rescaled so the interpolated ``|f|^2``
        integrates to one; otherwise the norm must already be 1 within 1e-8.
        """
        k = np.asarray(k, dtype=float)
        f = np.asarray(f)
        if np.iscomplexobj(f):
            raise ParameterError("tabulated spectral amplitudes must be real")
        f = f.astype(float)
        if k.ndim != 1 or k.shape != f.shape or k.size < 2:
            raise ParameterError("need matching 1-D arrays of at least two samples")
        if np.any(np.diff(k) <= 0):
            raise ParameterError("sample frequencies must be strictly increasing")
        norm = _piecewise_linear_norm(k, f)
        if norm <= 0:
            raise ParameterError("tabulated spectrum is identically zero")
        if normalize:
            f = f / np.sqrt(norm)
        elif abs(norm - 1) > 1e-8:
            raise ParameterError(f"spectrum is not normalized: int |f|^2 dk = {norm:.12g}")
        peak = np.max(np.abs(f))
        if max(abs(f[0]), abs(f[-1])) > edge_tol * peak:
            warnings.warn(
                f"tabulated spectrum is truncated: edge amplitude exceeds {edge_tol:g} "
                "of the peak, integrals miss the cut-off tails",
                TruncationWarning,
                stacklevel=2,
            )
        density = f * f
        centre = float(integrate.trapezoid(k * density, k) / integrate.trapezoid(density, k))
        k.setflags(write=False)
        f.setflags(write=False)
        return cls(SpectrumKind.TABULATED, centre, samples=(k, f))

    @classmethod
    def from_file(cls, path, normalize=True):
        k, f = read_spectrum(path)
        return cls.tabulated(k, f, normalize=normalize)

    def amplitude(self, k):
        k = np.asarray(k, dtype=float)
        if self.kind is SpectrumKind.LORENTZIAN:
            g = self.gamma
            return np.sqrt(2 / (np.pi * g)) * g * g / ((k - self.k0) ** 2 + g * g)
        ks, fs = self.samples
        return np.interp(k, ks, fs, left=0.0, right=0.0)

    def norm(self):
        """``int |f|^2 dk`` (quadrature for Lorentzians, exact for tables)."""
        if self.kind is SpectrumKind.LORENTZIAN:
            density = lambda k: float(self.amplitude(k)) ** 2  # noqa: E731
            pieces = [(-np.inf, self.k0), (self.k0, np.inf)]
            return sum(integrate.quad(density, a, b, epsabs=0, epsrel=1e-12)[0] for a, b in pieces)
        # Exact for the piecewise-linear interpolant.
        return _piecewise_linear_norm(*self.samples)


def read_spectrum(path):
    """Read a whitespace-delimited two-column ``k f`` table; ``#`` starts a comment."""
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ParameterError(f"{path}: expected two columns (k, f), found {data.shape[1]}")
    return data[:, 0], data[:, 1]


def _breakpoints(ks, extra=()):
    inner = list(ks[1:-1]) if len(ks) <= 400 else list(ks[1:-1:max(1, len(ks) // 400)])
    pts = sorted(set(inner) | {p for p in extra if ks[0] < p < ks[-1]})
    return pts or None


def _limit(ks):
    return max(200, 4 * min(len(ks), 400))


def _require_degenerate(params, what):
    if not params.degenerate:
        raise ParameterError(f"{what} needs a degenerate cavity")


def _spectrum(params, spectrum):
    return complex_frequencies(params) if spectrum is None else spectrum


# -- closed forms -----------------------------------------------------------

def _lorentzian_transmission(spec, t, params, cs):
    a1 = cs.alpha[0]
    ke = params.kappa_e[0]
    k0, g = spec.k0, spec.gamma
    scale = np.sqrt(2 * np.pi * g)
    t = np.asarray(t, dtype=float)
    lag = np.abs(t)
    below = k0 - 1j * g
    above = k0 + 1j * g
    eps = below - a1
    if abs(eps) > DOUBLE_POLE_RTOL * (g + params.kappa[0]):
        later = (np.exp(-1j * below * lag) * (1 - 1j * ke / eps)
                 - np.exp(-1j * a1 * lag) * 2 * g * ke / ((a1 - k0) ** 2 + g * g))
    else:
        # Wavepacket pole k0 - i g meets the cavity pole: the two residues
        # cancel to leading order. Same expression regrouped around eps.
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = np.expm1(1j * eps * lag) / eps if eps != 0 else 1j * lag
            bracket = 1j * (ratio - 1 / (2j * g)) / (1 + eps / (2j * g))
            later = np.exp(-1j * below * lag) * (1 + ke * bracket)
    # exp(-i (k0 + i g) t) for t = -lag
    earlier = np.exp(1j * above * lag) * (1 - 1j * ke / (above - a1))
    return scale * np.where(t >= 0, later, earlier)


def _lorentzian_kernel(spec, tau, params, cs):
    a1 = cs.alpha[0]
    ke = params.kappa_e[0]
    z = spec.k0 + 1j * spec.gamma
    tau = np.asarray(tau, dtype=float)
    lag = np.abs(tau)
    amp = (-4 * np.pi * params.g ** 2 * ke * ke * spec.gamma
           / ((z - a1) ** 2 * cs.pair_denominator(2 * z)))
    # tau < 0 branch exp(-2 i z tau + i alpha1 tau) rewritten with tau = -lag.
    return amp * np.where(tau >= 0, np.exp(-1j * a1 * lag), np.exp(2j * z * lag - 1j * a1 * lag))


def wavepacket_transmission(spec: WavepacketSpec, t, params: CavityParams,
                            spectrum: ComplexSpectrum | None = None):
    """Wavepacket-averaged transmission ``int dk f(k) exp(-i k t) t_k``.

    Closed form for Lorentzian spectra (t = 0 uses the t > 0 branch, the two
    agree there); tabulated spectra are integrated numerically.
    """
    cs = _spectrum(params, spectrum)
    if spec.kind is SpectrumKind.LORENTZIAN:
        return _lorentzian_transmission(spec, t, params, cs)
    return _vectorize(lambda s: transmission_quad(spec, s, params, cs).value, t)


def wavepacket_kernel(spec: WavepacketSpec, tau, params: CavityParams,
                      spectrum: ComplexSpectrum | None = None):
    """Bound-state kernel T(k0, t=0, tau) averaged over the wavepacket (degenerate cavity)."""
    _require_degenerate(params, "the wavepacket kernel")
    cs = _spectrum(params, spectrum)
    if spec.kind is SpectrumKind.LORENTZIAN:
        return _lorentzian_kernel(spec, tau, params, cs)
    return _vectorize(lambda s: kernel_quad(spec, s, params, spectrum=cs).value, tau)


def wavepacket_g2(spec: WavepacketSpec, tau, params: CavityParams,
                  spectrum: ComplexSpectrum | None = None):
    """Second-order correlation of a transmitted wavepacket, first click at t = 0."""
    _require_degenerate(params, "wavepacket g2")
    cs = _spectrum(params, spectrum)
    t_first = wavepacket_transmission(spec, 0.0, params, cs)
    t_second = wavepacket_transmission(spec, tau, params, cs)
    coherent = t_first * t_second
    numerator = np.abs(coherent + wavepacket_kernel(spec, tau, params, cs)) ** 2
    weight = np.abs(coherent) ** 2
    if np.any(weight < TRANSMISSION_FLOOR ** 2):
        raise DivergenceError(
            "wavepacket g2: normalization divergent (wavepacket transmission underflows)",
            numerator=numerator,
        )
    return numerator / weight


def _vectorize(func, x):
    x = np.asarray(x, dtype=float)
    out = np.array([func(float(v)) for v in x.ravel()], dtype=complex)
    return out.reshape(x.shape) if x.ndim else out[0]


# -- numerical routes --------------------------------------------------------

def _quad_complex(func, a, b, **kw):
    re, e1 = integrate.quad(lambda k: func(k).real, a, b, **kw)
    im, e2 = integrate.quad(lambda k: func(k).imag, a, b, **kw)
    return complex(re, im), e1 + e2


def _fourier_tail(func, start, t, epsrel, epsabs):
    """``int_start^inf func(k) exp(-i k t) dk`` for a decaying complex func."""
    if t == 0:
        return _quad_complex(func, start, np.inf, epsabs=epsabs, epsrel=epsrel, limit=200)
    w = abs(t)
    sign = np.sign(t)
    # exp(-i k t) = cos(w k) - i sign sin(w k)
    pieces = []
    for part, weight in itertools.product(("real", "imag"), ("cos", "sin")):
        val, err = integrate.quad(lambda k: getattr(func(k), part), start, np.inf,
                                  weight=weight, wvar=w, limlst=100)
        pieces.append((val, err))
    (rc, erc), (rs, ers), (ic, eic), (is_, eis) = pieces
    value = complex(rc + sign * is_, ic - sign * rs)
    return value, erc + ers + eic + eis


def transmission_quad(spec: WavepacketSpec, t, params: CavityParams,
                      spectrum: ComplexSpectrum | None = None, epsrel=1e-11) -> QuadResult:
    """Numerical ``int dk f(k) exp(-i k t) t_k`` with an error estimate.

    Lorentzian spectra: adaptive quadrature on a core window of
    ``+-50 max(gamma, kappa_1)`` around k0 (breakpoints at k0 and the
    resonance) plus semi-infinite tails (Fourier-weighted when t != 0).
    Tabulated spectra: adaptive quadrature over the table support.
    """
    cs = _spectrum(params, spectrum)
    t = float(t)

    def integrand(k):
        return complex(spec.amplitude(k) * transmission(k, params, 1, cs))

    def with_carrier(k):
        return integrand(k) * np.exp(-1j * k * t)

    resonance = params.omega[0]
    if spec.kind is SpectrumKind.TABULATED:
        ks, fs = spec.samples
        # Floor for a vanishing real or imaginary part.
        epsabs = epsrel * float(integrate.trapezoid(np.abs(fs), ks))
        return QuadResult(*_quad_complex(
            with_carrier, ks[0], ks[-1], points=_breakpoints(ks, (resonance,)),
            limit=_limit(ks) + 50, epsabs=epsabs, epsrel=epsrel))

    half = WINDOW_WIDTHS * max(spec.gamma, params.kappa[0])
    lo, hi = spec.k0 - half, spec.k0 + half
    points = sorted({p for p in (spec.k0, resonance) if lo < p < hi})
    epsabs = epsrel * np.sqrt(2 * np.pi * spec.gamma)
    core, err = _quad_complex(with_carrier, lo, hi, points=points, limit=500,
                              epsabs=epsabs, epsrel=epsrel)
    upper, e_up = _fourier_tail(integrand, hi, t, epsrel, epsabs)
    # Lower tail via k -> -k: int_{-lo}^inf func(-u) exp(+i u t) du.
    lower, e_lo = _fourier_tail(lambda u: integrand(-u), -lo, -t, epsrel, epsabs)
    return QuadResult(core + upper + lower, err + e_up + e_lo)


def _pair_integrand(spec, tau, t, params, cs):
    """f(k1) f(k2) x (time-domain bound amplitude from the S-matrix kernel)."""

    def amp(k1, k2):
        carrier = np.exp(-1j * k1 * t - 1j * k2 * (t + tau))
        return bound_state_amplitude(k1, k2, tau, params, cs) * carrier

    return amp


def kernel_quad(spec: WavepacketSpec, tau, params: CavityParams, t=0.0,
                spectrum: ComplexSpectrum | None = None, rtol=1e-7) -> QuadResult:
    """Numerical wavepacket bound-state kernel from the momentum-space S-matrix.

    The outgoing-momentum integral is contracted by residues
    (:func:`~photon_scatter.smatrix.bound_state_amplitude`); the remaining
    integral over both input momenta is done by adaptive cubature. Lorentzian
    spectra are mapped to ``k = k0 + gamma tan(theta)``, which turns the
    Lorentzian measure into a flat one on a finite square. Slow: up to a few
    seconds for narrow spectra, more for oscillatory (tau < 0 or t != 0) cases.
    """
    _require_degenerate(params, "the wavepacket kernel")
    cs = _spectrum(params, spectrum)
    amp = _pair_integrand(spec, float(tau), float(t), params, cs)

    if spec.kind is SpectrumKind.LORENTZIAN:
        g = spec.gamma
        k0 = spec.k0
        jac = 2 * g / np.pi  # f(k1) f(k2) dk1 dk2 = (2 gamma / pi) dtheta1 dtheta2

        def body(x):
            k = k0 + g * np.tan(x)
            return jac * amp(k[:, 0], k[:, 1])

        edges = [-np.pi / 2, np.pi / 2]
        if params.kappa[0] > g:
            cut = np.arctan(params.kappa[0] / g)
            edges = [-np.pi / 2, -cut, cut, np.pi / 2]
    else:
        ks, _ = spec.samples

        def body(x):
            return spec.amplitude(x[:, 0]) * spec.amplitude(x[:, 1]) * amp(x[:, 0], x[:, 1])

        edges = [ks[0], ks[-1]]

    def split(x):
        v = body(x)
        return np.stack([v.real, v.imag], axis=-1)

    # Absolute floor from a coarse Gauss-Legendre pass so a vanishing real or
    # imaginary part cannot stall the relative test.
    nodes, weights = np.polynomial.legendre.leggauss(64)
    coarse = 0.0
    for (a, b), (c, d) in itertools.product(zip(edges[:-1], edges[1:]), repeat=2):
        xa = 0.5 * (b - a) * nodes + 0.5 * (b + a)
        xc = 0.5 * (d - c) * nodes + 0.5 * (d + c)
        grid = np.stack(np.meshgrid(xa, xc, indexing="ij"), axis=-1).reshape(-1, 2)
        w = np.outer(weights, weights).ravel() * 0.25 * (b - a) * (d - c)
        coarse += np.sum(w * body(grid))
    atol = rtol * max(abs(coarse), 1e-300)

    value = np.zeros(2)
    error = 0.0
    for (a, b), (c, d) in itertools.product(zip(edges[:-1], edges[1:]), repeat=2):
        res = integrate.cubature(split, [a, c], [b, d], rtol=rtol, atol=atol,
                                 max_subdivisions=200_000)
        if res.status != "converged":
            warnings.warn("wavepacket kernel cubature did not converge", RuntimeWarning,
                          stacklevel=2)
        value = value + res.estimate
        error += float(np.hypot(*res.error))
    # Symmetric factor 1/2 for identical photons lives in bound_state_amplitude.
    return QuadResult(complex(value[0], value[1]), error)
