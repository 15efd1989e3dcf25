"""Self-organization and superradiant backscattering in a pumped ring cavity."""
from .dynamics import FieldAmplitudes, SingularDenominatorError, SystemParams
from .meanfield import DensityProfile, FixedPointResult, NoLocalMinimumError
from .simulate import EnsembleState, NonFiniteStateError, ObservableRecord, SimConfig

__all__ = [
    "DensityProfile", "EnsembleState", "FieldAmplitudes", "FixedPointResult", "NoLocalMinimumError",
    "NonFiniteStateError", "ObservableRecord", "SimConfig", "SingularDenominatorError", "SystemParams",
]
