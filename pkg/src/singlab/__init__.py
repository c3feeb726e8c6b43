"""Numerics for the half-line Hamiltonian -d^2/dx^2 with complex Robin
condition phi'(0) + (d + ib) phi(0) = 0: its metric operator, the
equivalent Hermitian eigenfunctions and scattering observables."""

from .model import ModelParams, SpectrumKind, classify_spectrum
from .quad import QuadratureSpec

__all__ = ["ModelParams", "SpectrumKind", "classify_spectrum", "QuadratureSpec"]
__version__ = "0.1.0"
