"""Collective resonance fluorescence of dipole-dipole coupled emitters.

Closed-form 2N+1-line spectra, dense master-equation oracles on the
symmetric subspace, and recovery of (N, coupling, drive) from sampled
spectra.  All quantities are expressed in units of the single-emitter decay
rate; spectra live on the offset axis x = (nu - omega_L)/gamma.
"""

from .analytic import (LineSpectrum, SampledSpectrum, SpectralLine,
                       evaluate_spectrum, general_lines, integrated_weight,
                       mollow_limit_lines, three_atom_lines, two_atom_lines)
from .core import (CollectiveOperators, DressedFrame, SecularRegimeWarning,
                   SystemParams, collective_operators, dressed_frame,
                   make_params, scaled_coupling)
from .inference import (FitResult, InferenceError, InferenceResult, Peak,
                        add_multiplicative_noise, detect_peaks,
                        estimate_mean_distance, fit_lorentzians,
                        infer_parameters, merged_regime_proxy)
from .io import (GridSpec, ParamsFile, ParseError, read_lines, read_params,
                 read_spectrum, write_lines, write_params, write_spectrum)
from .liouville import (CorrelatorSpec, Liouvillian, LiouvilleError,
                        bare_spectrum_oracle, build_bare_liouvillian,
                        build_secular_liouvillian, coherence_decay_rates,
                        dressed_spectrum_oracle, propagate,
                        resolvent_correlator, steady_state,
                        time_domain_correlator)

__version__ = "0.1.0"

__all__ = [
    "CollectiveOperators", "CorrelatorSpec", "DressedFrame", "FitResult",
    "GridSpec", "InferenceError", "InferenceResult", "LineSpectrum",
    "Liouvillian", "LiouvilleError", "ParamsFile", "ParseError", "Peak",
    "SampledSpectrum", "SecularRegimeWarning", "SpectralLine", "SystemParams",
    "add_multiplicative_noise", "bare_spectrum_oracle",
    "build_bare_liouvillian", "build_secular_liouvillian",
    "coherence_decay_rates", "collective_operators", "detect_peaks",
    "dressed_frame", "dressed_spectrum_oracle", "estimate_mean_distance",
    "evaluate_spectrum", "fit_lorentzians", "general_lines",
    "infer_parameters", "integrated_weight", "make_params",
    "merged_regime_proxy", "mollow_limit_lines", "propagate", "read_lines",
    "read_params", "read_spectrum", "resolvent_correlator", "scaled_coupling",
    "steady_state", "three_atom_lines", "time_domain_correlator",
    "two_atom_lines", "write_lines", "write_params", "write_spectrum",
]
