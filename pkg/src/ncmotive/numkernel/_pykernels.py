"""Pure numpy implementations of the hot loops.

Same signatures as the compiled ``_ckernels`` module; used when the
extension is unavailable or ``NCMOTIVE_PURE_PYTHON`` is set.
"""
import numpy as np

_BLOCK = 256


def power_sum(s, a, n_terms):
    """Return ``sum_{k < n_terms[i]} (a + k) ** (-s[i])`` for every i."""
    s = np.ascontiguousarray(s, dtype=np.complex128)
    n_terms = np.ascontiguousarray(n_terms, dtype=np.int64)
    out = np.zeros(s.shape, dtype=np.complex128)
    if s.size == 0:
        return out
    nmax = int(n_terms.max())
    if nmax <= 0:
        return out
    logs = np.log(a + np.arange(nmax, dtype=np.float64))
    ks = np.arange(nmax)
    for start in range(0, s.size, _BLOCK):
        sl = slice(start, start + _BLOCK)
        sb = s[sl]
        nb = n_terms[sl]
        width = int(nb.max())
        if width <= 0:
            continue
        terms = np.exp(-np.outer(sb, logs[:width]))
        terms[ks[None, :width] >= nb[:, None]] = 0.0
        # smallest terms first
        out[sl] = terms[:, ::-1].sum(axis=1)
    return out


def residue_power_sums(beta, nmax, modulus):
    """Bin ``m ** -beta`` for ``1 <= m <= nmax`` by residue ``m mod modulus``."""
    if nmax < 1:
        return np.zeros(modulus)
    m = np.arange(nmax, 0, -1, dtype=np.int64)
    w = np.exp(-beta * np.log(m.astype(np.float64)))
    return np.bincount(m % modulus, weights=w, minlength=modulus)


def partial_zeta(beta, nmax):
    """``sum_{m <= nmax} m ** -beta``, summed from the small end."""
    if nmax < 1:
        return 0.0
    m = np.arange(nmax, 0, -1, dtype=np.float64)
    return float(np.sum(np.exp(-beta * np.log(m))))
