# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: truncated Dirichlet/Hurwitz power sums and Gibbs sums."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, cos, sin

cnp.import_array()


def power_sum(s, double a, n_terms):
    """Return ``sum_{k < n_terms[i]} (a + k) ** (-s[i])`` for every i."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] sv = np.ascontiguousarray(
        np.ravel(s), dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] nv = np.ascontiguousarray(
        np.ravel(n_terms), dtype=np.int64)
    cdef Py_ssize_t n = sv.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(n, dtype=np.complex128)
    if n == 0:
        return out.reshape(np.shape(s))
    cdef long nmax = max(0, int(nv.max()))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logs = np.empty(max(nmax, 1))
    cdef long k
    cdef Py_ssize_t i
    cdef double sr, si, mag, ph, accr, acci, lk
    for k in range(nmax):
        logs[k] = log(a + k)
    for i in range(n):
        sr = sv[i].real
        si = sv[i].imag
        accr = 0.0
        acci = 0.0
        # smallest terms first
        for k in range(nv[i] - 1, -1, -1):
            lk = logs[k]
            mag = exp(-sr * lk)
            ph = -si * lk
            accr += mag * cos(ph)
            acci += mag * sin(ph)
        out[i] = accr + 1j * acci
    return out.reshape(np.shape(s))


def residue_power_sums(double beta, long nmax, long modulus):
    """Bin ``m ** -beta`` for ``1 <= m <= nmax`` by residue ``m mod modulus``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc = np.zeros(modulus)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] comp = np.zeros(modulus)
    cdef long m, r
    cdef double term, y, t
    for m in range(nmax, 0, -1):
        r = m % modulus
        term = exp(-beta * log(<double>m))
        # Kahan per bin
        y = term - comp[r]
        t = acc[r] + y
        comp[r] = (t - acc[r]) - y
        acc[r] = t
    return acc


def partial_zeta(double beta, long nmax):
    """``sum_{m <= nmax} m ** -beta``, compensated, summed from the small end."""
    cdef double acc = 0.0, comp = 0.0, term, y, t
    cdef long m
    for m in range(nmax, 0, -1):
        term = exp(-beta * log(<double>m))
        y = term - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
    return acc
