"""Exact Sturmian matrix sequences, their limit points and Diophantine exponents."""

from .certreal import CertReal
from .errors import DomainError, InsufficientDepth, PrecisionExhausted, SchemaError, SturmlabError, WindowError
from .exact import Mat2, Point, u_map
from .geometry import compare, successive_minima, three_system
from .limits import XiHandle, empirical_exponents, predicted_exponents, xi
from .sturm import SturmSeq, growth, new_seq, reconstruct, verify_identities
from .words import SeqSpec, sigma

__version__ = "0.1.0"

__all__ = [
    "CertReal", "DomainError", "InsufficientDepth", "PrecisionExhausted", "SchemaError",
    "SturmlabError", "WindowError", "Mat2", "Point", "u_map", "compare", "successive_minima",
    "three_system", "XiHandle", "empirical_exponents", "predicted_exponents", "xi", "SturmSeq",
    "growth", "new_seq", "reconstruct", "verify_identities", "SeqSpec", "sigma",
]
