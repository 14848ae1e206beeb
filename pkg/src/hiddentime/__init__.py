"""Numerical checks of a three-dimensional-time account of the free Dirac field.

Velocity is mapped to time-sphere angles, the angles to Dirac spinors,
and the spinors are checked against the Dirac equation, the Hopf-bundle
quantization condition and the Bargmann-Wigner equations.  A Monte Carlo
simulator models measurement with a hidden time angle.
"""

__version__ = "0.1.0"
