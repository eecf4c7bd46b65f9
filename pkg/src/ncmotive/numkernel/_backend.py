"""Select the compiled kernels when available, else the numpy fallback.

Set ``NCMOTIVE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if not os.environ.get("NCMOTIVE_PURE_PYTHON"):
    try:
        from . import _ckernels as kernels  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        kernels = _pykernels


def use_backend(name):
    """Switch backends at runtime (``"cython"`` or ``"python"``); returns the old name."""
    global kernels, BACKEND
    old = BACKEND
    if name == "python":
        kernels, BACKEND = _pykernels, "python"
    elif name == "cython":
        from . import _ckernels
        kernels, BACKEND = _ckernels, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return old


def power_sum(s, a, n_terms):
    return kernels.power_sum(s, a, n_terms)


def residue_power_sums(beta, nmax, modulus):
    return kernels.residue_power_sums(float(beta), int(nmax), int(modulus))


def partial_zeta(beta, nmax):
    return kernels.partial_zeta(float(beta), int(nmax))
