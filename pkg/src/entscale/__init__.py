"""Entanglement scaling in exact simulations of adiabatic and order-finding algorithms."""
from .errors import ConvergenceFailure, InvalidArgument, InvalidState, NotCoprime, ResourceLimit
from .statevec import BiPartition, EntanglementReport, StateVector, entropy, schmidt_rank

__version__ = "0.1.0"

__all__ = [
    "BiPartition", "ConvergenceFailure", "EntanglementReport", "InvalidArgument", "InvalidState",
    "NotCoprime", "ResourceLimit", "StateVector", "entropy", "schmidt_rank",
]
