"""Special functions on symmetric cones: spherical polynomials, Laguerre functions,
Bessel functions and Whittaker vectors, with numerical checks of their identities."""
from .bessel import SeriesTruncation, ibessel, ibessel2, kbessel_rank1
from .cone import ConeParams, Family, dim_km, enumerate_partitions, gamma_omega, pochhammer
from .errors import SymConeError
from .jordan import JordanElement, frame_element, identity, scalar_element
from .laguerre import binomial, laguerre_fn, laguerre_poly, recurrence_coeffs
from .models import Model, expansion_coefficients, expansion_partial, psi_basis, whittaker_closed_form
from .spherical import phi_eval

__version__ = "0.1.0"

__all__ = [
    "ConeParams", "Family", "JordanElement", "Model", "SeriesTruncation", "SymConeError",
    "binomial", "dim_km", "enumerate_partitions", "expansion_coefficients", "expansion_partial",
    "frame_element", "gamma_omega", "ibessel", "ibessel2", "identity", "kbessel_rank1",
    "laguerre_fn", "laguerre_poly", "phi_eval", "pochhammer", "psi_basis", "recurrence_coeffs",
    "scalar_element", "whittaker_closed_form",
]
