"""Numerical laboratory for finite Blaschke model spaces.

Builds Takenaka-Malmquist bases of the model space K_u (H^2 minus u H^2)
for finite Blaschke products u, assembles truncated Toeplitz and Hankel
operator matrices, and
verifies the operator identities, Schatten-norm comparabilities, and
Hilbert-Schmidt formulas that govern them at desk scale.
"""

__version__ = "0.1.0"
