"""Linear-optics simulation of pre/post-selected wave-particle separation."""

from .hilbert import (
    CompositeSpace,
    LinearOperator,
    Register,
    StateVector,
    basis_state,
    controlled_embed,
    embed,
    fidelity_up_to_phase,
    inner,
    superpose,
)
from .optics import ToolboxParams, particle_state, toolbox, wave_state
from .scenario import (
    DetectorStats,
    ScenarioConfig,
    WeakValueReport,
    detector_probabilities,
    post_state,
    pre_state,
    projector_set,
    sample_detectors,
    weak_value,
    weak_value_report,
)
from .pointer import PointerGrid, estimate_weak_value

__version__ = "0.1.0"
