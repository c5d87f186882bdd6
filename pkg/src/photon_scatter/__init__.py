"""Few-photon scattering in a waveguide-coupled three-mode chi(2) cavity.

Exact one- and two-photon S-matrices, their Feynman-series expansions, and
the correlation observables built from them (photon blockade g2, nonlinear
phase shift, two-mode Cauchy-Schwarz ratio, finite-wavepacket corrections).
"""
__version__ = "0.1.0"

from .exceptions import ConvergenceError, DivergenceError, ManifoldError, ParameterError
from .feynman import DiagramSeries, series_g3, series_g22
from .observables import (
    CorrelationTrace,
    TraceKind,
    approx_down_conversion_g2,
    blockade_g2,
    blockade_kernel,
    down_conversion_g2,
    nonlinear_phase,
    pair_rate,
    two_mode_kernel,
    two_photon_wavefunction,
    zeta,
)
from .params import CavityParams, ComplexSpectrum, complex_frequencies
from .smatrix import (
    DeltaSupport,
    S22Terms,
    bound_state_amplitude,
    full_s22,
    one_to_two_amplitude,
    three_point_green,
    transmission,
    two_photon_kernel,
    two_to_one_amplitude,
)
from .wavepacket import (
    SpectrumKind,
    WavepacketSpec,
    kernel_quad,
    transmission_quad,
    wavepacket_g2,
    wavepacket_kernel,
    wavepacket_transmission,
)

__all__ = [
    "__version__",
    "CavityParams", "ComplexSpectrum", "complex_frequencies",
    "ParameterError", "ManifoldError", "ConvergenceError", "DivergenceError",
    "transmission", "three_point_green", "two_to_one_amplitude", "one_to_two_amplitude",
    "two_photon_kernel", "full_s22", "bound_state_amplitude", "DeltaSupport", "S22Terms",
    "DiagramSeries", "series_g3", "series_g22",
    "CorrelationTrace", "TraceKind", "down_conversion_g2", "approx_down_conversion_g2",
    "pair_rate", "blockade_kernel", "blockade_g2", "nonlinear_phase", "two_mode_kernel",
    "zeta", "two_photon_wavefunction",
    "SpectrumKind", "WavepacketSpec", "wavepacket_transmission", "wavepacket_kernel",
    "wavepacket_g2", "transmission_quad", "kernel_quad",
]
