"""Spectral and quadrature toolkit for logarithmic Sobolev inequalities.

The package computes exact eigenvalues of intertwining operators and
hypoelliptic CR-Laplacians on the four families of round spheres carrying
a horizontal distribution (full tangent bundle, complex, quaternionic and
octonionic Hopf directions), and verifies the associated entropy
inequalities numerically: the sharp log-Sobolev inequality on each sphere,
its hypercontractivity corollary, the Gaussian limit, the Heisenberg-group
CR version, and the sharp Hardy-Littlewood-Sobolev multiplier bounds.

Layout:
    exactpoly    exact rational polynomial arithmetic and differential ops
    spectra      case tables, eigenvalue formulas, bound margins
    geometry     sphere models, horizontal frames, Heisenberg group, Cayley
    quadrature   reproducible Monte Carlo and deterministic integration
    inequalities entropy functionals, Dirichlet forms, inequality checks
    gauss_limit  limit constants, integral lemma, finite-n inequalities
    service      FastAPI wrapper exposing the verifications over HTTP
    cli          batch command line client
"""

__version__ = "0.1.0"
