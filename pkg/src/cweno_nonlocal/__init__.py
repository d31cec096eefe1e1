"""CWENO finite-volume schemes for 1D non-local conservation laws."""
from .grid import Grid
from .limiter import BoundPair
from .model import kernel_samples, sedimentation_model, traffic_model
from .quadrature import initial_cell_averages, radau_rule
from .reconstruction import ReconstructionParams, reconstruct
from .spatial import NonlocalRHS, cfl_step, rhs
from .timestep import get_integrator, integrate_to

__version__ = "0.1.0"
