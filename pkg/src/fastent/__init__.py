"""Simulated fast entanglement detection for two-qutrit (3x3) photonic states."""

from .measure import MeasurementPlan, MeasurementRecord, exact_probabilities, measure, sample_counts
from .mub import build_mub_family, verify_mub
from .qlin import DensityMatrix, PureState, fidelity_pure, partial_trace, partial_transpose
from .statesim import PRESETS, BeamProfile, ModulationPattern, canonical_states, generate_state
from .tomo import forced_purity, i_concurrence, linear_inversion
from .witness import build_witness, certify_bound, estimate_guess_state, run_detection

__version__ = "0.1.0"
