"""Perturbative evaluation of the three- and four-point Green's functions.

Each Green's function is a geometric series in the number of virtual
up/down-conversion loops. The leading diagram and the per-loop ratio are
assembled from the diagram rules below:

* propagator ``i / (k - alpha)``
* vertex ``-i g``
* energy conservation ``1 / sqrt(2 pi)`` per vertex
* symmetry factor ``m!`` for m same-mode lines joining the same pair of points

The closed forms in :mod:`photon_scatter.smatrix` are the sums of these series,
so this module doubles as an independent check of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exceptions import ConvergenceError, ManifoldError, ParameterError
from .params import CavityParams, ComplexSpectrum, complex_frequencies
from .smatrix import MANIFOLD_RTOL, DeltaSupport

__all__ = [
    "DiagramSeries",
    "propagator",
    "vertex",
    "bubble",
    "series_g3",
    "series_g22",
    "DEFAULT_MAX_ORDER",
    "DEFAULT_TOL",
]

DEFAULT_MAX_ORDER = 64
DEFAULT_TOL = 1e-12
DELTA_FACTOR = 1 / math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class DiagramSeries:
    """Partial sums of a geometric diagram series.

    Attributes
    ----------
    terms : tuple of complex
        Contribution of each order n = 0, 1, ... that was summed.
    ratio : complex
        Common ratio between consecutive orders.
    truncation_order : int
        Highest order included.
    converged : bool
        ``|ratio| < 1`` and the analytic tail bound is below the requested
        relative tolerance.
    tail_bound : float
        ``|terms[-1]| |r| / (1 - |r|)``, a rigorous bound on the omitted tail.
    disconnected : complex or None
        Four-point function only: the interaction-free diagram, which lives on
        the delta pairs in ``disconnected_support`` rather than on the
        energy-conservation manifold.
    """

    terms: tuple
    ratio: complex
    truncation_order: int
    converged: bool
    tail_bound: float
    disconnected: complex | None = None
    disconnected_support: tuple = field(default=())

    @property
    def total(self):
        return sum(self.terms, 0j)


def propagator(k, alpha):
    """Free propagator ``i / (k - alpha)`` of a lossy mode."""
    if not alpha.imag < 0:
        raise ParameterError("propagator needs a lossy mode (Im alpha < 0)")
    return 1j / (k - alpha)


def vertex(g):
    return -1j * g


def bubble(total, alpha1, alpha2):
    """Loop integral of two propagators carrying total momentum `total`.

    ``int dq  i/(q - alpha1) * i/(total - q - alpha2)``; the only pole in the
    upper half plane is ``q = total - alpha2``.
    """
    return 2j * math.pi / (total - alpha1 - alpha2)


def _sum_geometric(first, ratio, max_order, tol):
    if max_order < 0:
        raise ParameterError("max_order must be >= 0")
    r = abs(ratio)
    if r >= 1:
        raise ConvergenceError(ratio)
    terms = [first]
    total = first
    term = first
    while True:
        tail = abs(term) * r / (1 - r)
        if tail <= tol * abs(total) or len(terms) > max_order:
            break
        term = term * ratio
        terms.append(term)
        total += term
    return DiagramSeries(
        terms=tuple(terms),
        ratio=ratio,
        truncation_order=len(terms) - 1,
        converged=tail <= tol * abs(total),
        tail_bound=tail,
    )


def _loop_ratio(total, params, spec):
    """Contribution of one repeated loop: down-convert, propagate, up-convert."""
    a1, a2, a3 = spec.alpha
    sym = 1
    if params.degenerate:
        a2 = a1
        sym = 2  # two identical a1 lines in the bubble
    v = vertex(params.g) * DELTA_FACTOR
    return sym * v * v * bubble(total, a1, a2) * propagator(total, a3)


def _check(total_in, total_out):
    if abs(total_out - total_in) > MANIFOLD_RTOL * max(abs(total_in), abs(total_out)):
        raise ManifoldError(
            f"outgoing momentum {total_out!r} != incoming total {total_in!r}"
        )


def series_g3(p3, k1, k2, params: CavityParams, spectrum: ComplexSpectrum | None = None,
              max_order=DEFAULT_MAX_ORDER, tol=DEFAULT_TOL) -> DiagramSeries:
    """Diagram series of the three-point function G(p3; k1, k2).

    Returns the coefficient of ``delta(p3 - k1 - k2)`` order by order. Raises
    :class:`ConvergenceError` when the loop ratio has modulus >= 1.
    """
    _check(k1 + k2, p3)
    spec = complex_frequencies(params) if spectrum is None else spectrum
    a1, a2, a3 = spec.alpha
    sym = 1
    if params.degenerate:
        a2 = a1
        sym = 2  # two a1 legs enter the same vertex
    first = (sym * propagator(k1, a1) * propagator(k2, a2)
             * vertex(params.g) * DELTA_FACTOR * propagator(p3, a3))
    return _sum_geometric(first, _loop_ratio(p3, params, spec), max_order, tol)


def series_g22(p1, p2, k1, k2, params: CavityParams, spectrum: ComplexSpectrum | None = None,
               max_order=DEFAULT_MAX_ORDER, tol=DEFAULT_TOL) -> DiagramSeries:
    """Diagram series of the four-point function G(p1, p2; k1, k2).

    The connected diagrams are summed as a geometric series (the coefficient of
    ``delta(p1 + p2 - k1 - k2)``); the disconnected diagram is returned
    separately in ``disconnected``.
    """
    total = k1 + k2
    _check(total, p1 + p2)
    spec = complex_frequencies(params) if spectrum is None else spectrum
    a1, a2, a3 = spec.alpha
    sym = 1
    support = (DeltaSupport.DIAGONAL,)
    if params.degenerate:
        a2 = a1
        sym = 4  # 2! at each of the two vertices
        support = (DeltaSupport.DIAGONAL, DeltaSupport.EXCHANGE)
    legs_in = propagator(k1, a1) * propagator(k2, a2)
    legs_out = propagator(p1, a1) * propagator(p2, a2)
    v = vertex(params.g) * DELTA_FACTOR
    first = sym * legs_in * v * propagator(total, a3) * v * legs_out
    series = _sum_geometric(first, _loop_ratio(total, params, spec), max_order, tol)
    return DiagramSeries(
        terms=series.terms,
        ratio=series.ratio,
        truncation_order=series.truncation_order,
        converged=series.converged,
        tail_bound=series.tail_bound,
        disconnected=legs_in,
        disconnected_support=support,
    )
