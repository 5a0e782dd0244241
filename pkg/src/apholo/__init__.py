"""Almost periodic and semi-almost periodic holomorphic functions: Bohr
approximation, strip and disk extensions, and dbar gluing."""

from .ap_core import BasisSet, EvaluationOracle, Frequency, TrigPolynomial, bohr_mean, evaluate, shift, spectrum
from .as_functions import ASFunction
from .bochner_fejer import KernelSpec, apply_operator, build_kernel, certified_error, choose_kernel_for_net
from .disk_geometry import GeneratorSpec, sap_generator
from .errors import ApholoError
from .fields import GridField
from .polydisk import TensorFunction, tensor_approximate, tensor_eval, tensor_sup_norm
from .sap_circle import SAPFunction, build_sap, local_approximant, verify_sap
from .strip_holo import StripExpSum, poisson_extend_strip

__version__ = "0.1.0"

__all__ = [
    "ASFunction", "ApholoError", "BasisSet", "EvaluationOracle", "Frequency", "GeneratorSpec",
    "GridField", "KernelSpec", "SAPFunction", "StripExpSum", "TensorFunction", "TrigPolynomial",
    "apply_operator", "bohr_mean", "build_kernel", "build_sap", "certified_error",
    "choose_kernel_for_net", "evaluate", "local_approximant", "poisson_extend_strip",
    "sap_generator", "shift", "spectrum", "tensor_approximate", "tensor_eval", "tensor_sup_norm",
    "verify_sap",
]
