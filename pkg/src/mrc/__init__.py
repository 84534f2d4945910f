"""Modified Rayleigh Conjecture scattering solvers and the Stability Index Method."""
from .errors import (
    ConfigurationError,
    DomainError,
    MRCError,
    NumericalError,
    SamplingError,
    SingularityError,
    UnsupportedOrderError,
    WoodAnomalyError,
)
from .geometry import PeriodicProfile, parse_shape
from .lsq import LsqSolution, normalized_norm, solve_cutoff
from .oracle import CircleScatterer, circle_far_field, circle_scattered_field, illposedness_demo
from .periodic import QpGreensFunction, QpParams, periodic_mrc, qp_green
from .scattering import (
    Expansion,
    ScatteringProblem,
    SolveReport,
    eval_scattered,
    far_field,
    multipoint_mrc,
    optimal_mrc,
    random_mrc,
)
from .sim import BoxDomain, SimParams, powell_minimize, sim_minimize, sms
from .static import StaticProblem, eval_potential, static_mrc

__version__ = "0.1.0"
