"""
Pure-Spinor Verification Workbench
Clifford algebras, spinor purity, bilinear null vectors, Fock's S^3 spectrum and Wyler's alpha.
"""

__version__ = "1.0.0"
