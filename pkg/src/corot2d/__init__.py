"""2D periodic pseudospectral solver for incompressible flow coupled to a
corotational rate-type stress, with regularization options and a
verification harness built around the system's exact energy identities."""

from .dynamics import Regularization
from .fields import State, SymTensor2Field, VectorField2
from .grid import GridConfigError, PeriodicGrid, make_grid
from .stepping import SimConfig, cfl_dt, rk4_step, run

__version__ = "0.1.0"

__all__ = [
    "GridConfigError",
    "PeriodicGrid",
    "Regularization",
    "SimConfig",
    "State",
    "SymTensor2Field",
    "VectorField2",
    "cfl_dt",
    "make_grid",
    "rk4_step",
    "run",
    "__version__",
]
