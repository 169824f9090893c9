"""Orthogonal polynomials on the torus C / (Z + tau Z), tau = i * tau_im."""

from .eop import EOPFamily, EllipticPolynomial, build_family, degrees
from .quadrature import WeightSpec, build_rule, parse_weight
from .weierstrass import TorusLattice, build_lattice, wp, wp_prime, zeta_w

__all__ = [
    "EOPFamily",
    "EllipticPolynomial",
    "TorusLattice",
    "WeightSpec",
    "build_family",
    "build_lattice",
    "build_rule",
    "degrees",
    "parse_weight",
    "wp",
    "wp_prime",
    "zeta_w",
]
