"""Weak-form RBF methods for hyperbolic conservation laws."""

from weakrbf.kernels import Kernel, cubic, gaussian, inverse_quadratic, multiquadric, parse_kernel, quintic
from weakrbf.rbf_space import Domain, NodeSet, RbfSpace, build_space, equidistant_nodes, random_nodes

__all__ = [
    "Kernel", "cubic", "quintic", "gaussian", "multiquadric", "inverse_quadratic", "parse_kernel",
    "Domain", "NodeSet", "RbfSpace", "build_space", "equidistant_nodes", "random_nodes",
]

__version__ = "0.1.0"
