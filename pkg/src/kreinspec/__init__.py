"""Numerical spectra of Krein-von Neumann and Friedrichs/Dirichlet realizations.

Three independent routes to the same spectra live here: a finite-dimensional
model of abstract extension theory, exact transcendental formulas for
intervals and balls, and finite-difference discretizations, together with
counting-function analysis of the eigenvalue asymptotics.
"""

__version__ = "0.1.0"
