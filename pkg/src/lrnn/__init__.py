"""Local randomized neural networks for elliptic and parabolic interface problems."""
from .assembly import BlockSystem, RowTag, Weights, assemble_elliptic, assemble_mixed, assemble_spacetime
from .calculus import FdConfig
from .config import RunConfig, load_config
from .geometry import DomainBox, GeometrySpec, Hyperplane, MovingCircle, PolarCurve, Sphere
from .linsolve import SolverConfig, lstsq
from .problems import ExampleSpec, ProblemDefinition, example
from .randnet import RandomFeatureNetwork, build_network, eval_basis
from .runner import run, solve_trial, sweep
from .sampling import SamplingPlan, sample_collocation
from .solution import SolutionCoefficients

__version__ = "0.1.0"

__all__ = [
    "BlockSystem", "RowTag", "Weights", "assemble_elliptic", "assemble_mixed", "assemble_spacetime",
    "FdConfig", "RunConfig", "load_config",
    "DomainBox", "GeometrySpec", "Hyperplane", "MovingCircle", "PolarCurve", "Sphere",
    "SolverConfig", "lstsq", "ExampleSpec", "ProblemDefinition", "example",
    "RandomFeatureNetwork", "build_network", "eval_basis", "run", "solve_trial", "sweep",
    "SamplingPlan", "sample_collocation", "SolutionCoefficients",
]
