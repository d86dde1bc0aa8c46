"""Ultra-relativistic Euler equations: exact wave curves, Riemann solver, Glimm scheme."""
from ._accel import USE_NUMBA
from .eos import (CustomTabulated, DomainError, EosParams, Polytropic, Radiation,
                  RangeError)
from .riemann import WaveFan, solve, sample, wave_strengths
from .states import (ConservedState, DecodeError, InvariantState, PrimitiveState,
                     to_conserved, to_invariants, to_primitive, from_invariants)
from .wavecurves import Family, NumericalError, ShockPoint

__all__ = [
    "USE_NUMBA", "CustomTabulated", "DomainError", "EosParams", "Polytropic", "Radiation",
    "RangeError", "WaveFan", "solve", "sample", "wave_strengths", "ConservedState",
    "DecodeError", "InvariantState", "PrimitiveState", "to_conserved", "to_invariants",
    "to_primitive", "from_invariants", "Family", "NumericalError", "ShockPoint",
]
__version__ = "0.1.0"
