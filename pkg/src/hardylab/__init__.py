"""Hardy-type operators on mixed radial-angular spaces: exact norms,
closed-form sharp constants and a verification harness."""

from ._kernels import BACKEND
from .funcspace import AngularPattern, MixedFunction, PowerPiece, RadialProfile
from .norms import SpaceSpec, norm
from .operators import OperatorSpec, WeightFunction, apply_operator
from .quadrature import QuadGrid
from .sharpconst import TheoremCase, sharp_constant, validate
from .extremal import make_extremal
from .verify import VerifyConfig, verify_theorem

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AngularPattern",
    "MixedFunction",
    "PowerPiece",
    "RadialProfile",
    "SpaceSpec",
    "norm",
    "OperatorSpec",
    "WeightFunction",
    "apply_operator",
    "QuadGrid",
    "TheoremCase",
    "sharp_constant",
    "validate",
    "make_extremal",
    "VerifyConfig",
    "verify_theorem",
]
