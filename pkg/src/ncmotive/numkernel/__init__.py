"""Special functions and quadrature shared by the numerical modules."""
from ._backend import BACKEND, use_backend
from .quadrature import (QuadratureResult, integrate_adaptive, integrate_log_line,
                         mellin_transform)
from .special import (EULER_GAMMA, digamma, gamma, hurwitz_zeta, log_gamma, zeta)

__all__ = [
    "BACKEND", "use_backend", "QuadratureResult", "integrate_adaptive",
    "integrate_log_line", "mellin_transform", "EULER_GAMMA", "digamma", "gamma",
    "hurwitz_zeta", "log_gamma", "zeta",
]
