"""Entire maximal graphs with conelike singularities in Lorentz-Minkowski space.

Modules:
    lorentz      L^3 algebra (inner product, wedge, stereographic projection)
    curve        the hyperelliptic curve w^2 = R(z) and branch tracking
    weierstrass  Weierstrass data (g, phi3) for the explicit family and local models
    quadrature   Gauss-Kronrod integration along tracked paths, periods
    graph        the immersion X, singular points, cone asymptotics, meshes
    mechanics    flux and torque, balance laws
    hypotheses   numerical checks of the construction's hypotheses
    domain       harmonic measures and normalized 1-forms on circular domains
    cli          command line front end
"""

from .curve import CurveError, CurveParams
from .domain import DomainParams, Divisor, eta_basis, period_matrix, tau_form, kappa_form
from .graph import MaximalGraph, MeshSpec
from .lorentz import lorentz_wedge, minkowski_inner, stereographic
from .mechanics import balance_report
from .weierstrass import Catenoid, LocalModel, RiemannFamily

__version__ = "0.1.0"

__all__ = [
    "CurveError", "CurveParams", "DomainParams", "Divisor", "eta_basis", "period_matrix",
    "tau_form", "kappa_form", "MaximalGraph", "MeshSpec", "lorentz_wedge", "minkowski_inner",
    "stereographic", "balance_report", "Catenoid", "LocalModel", "RiemannFamily",
]
