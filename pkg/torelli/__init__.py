from torelli.ciani import CianiMatrix, classify
from torelli.klein import verify_klein_corollary, verify_main_identity
from torelli.resultant import discriminant_quartic
from torelli.theta import RiemannMatrix, theta_null

__all__ = [
    "CianiMatrix",
    "RiemannMatrix",
    "classify",
    "discriminant_quartic",
    "theta_null",
    "verify_klein_corollary",
    "verify_main_identity",
]
