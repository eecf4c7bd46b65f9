"""Archimedean local factors from Hodge data and their Lefschetz form.

Conventions: Gamma_C(z) = (2 pi)^-z Gamma(z), Gamma_R(z) = 2^-1/2 pi^-z/2 Gamma(z/2),
z = (1 + m)/2 + i s on the critical line, and
``-2 d/ds Im log F(z) = -2 Re F'/F(z)`` for the log-derivatives.
"""
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import ConvergenceError, SingularityError
from .numkernel import EULER_GAMMA, digamma, integrate_adaptive, log_gamma, mellin_transform

LOG_2PI = math.log(2 * math.pi)
LOG_PI = math.log(math.pi)


def gamma_factor(kind, z):
    """Gamma_C or Gamma_R at z (PoleError at the poles of Gamma)."""
    z = complex(z)
    if kind in ("C", "complex"):
        return complex(np.exp(log_gamma(z) - z * LOG_2PI))
    if kind in ("R", "real"):
        return complex(np.exp(log_gamma(z / 2) - 0.5 * z * LOG_PI - 0.5 * math.log(2)))
    raise ValueError(f"unknown kind {kind!r}")


def _dlog_gamma_factor(kind, z):
    """d/dz log Gamma_kind(z)."""
    if kind == "C":
        return digamma(z) - LOG_2PI
    return 0.5 * digamma(z / 2) - 0.5 * LOG_PI


@dataclass
class HodgeStructure:
    """Hodge numbers h^{p,q} of weight m, plus h^{p,+-} on H^{p,p} for real places.

    h^{p,+} counts the (-1)^p eigenspace of F_inf on H^{p,p}.
    """
    m: int
    hpq: dict
    hpm: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hpq = {(int(p), int(q)): int(h) for (p, q), h in self.hpq.items() if h}
        self.hpm = {int(p): (int(a), int(b)) for p, (a, b) in self.hpm.items()}
        for (p, q), h in self.hpq.items():
            if p + q != self.m or p < 0 or q < 0:
                raise ValueError(f"(p, q) = ({p}, {q}) is not of weight {self.m}")
            if h < 0:
                raise ValueError("Hodge numbers are non-negative")
            if self.hpq.get((q, p), 0) != h:
                raise ValueError(f"h^{{{p},{q}}} != h^{{{q},{p}}}")
        for p, (a, b) in self.hpm.items():
            if a < 0 or b < 0 or a + b != self.hpq.get((p, p), 0):
                raise ValueError(f"h^{{{p},+}} + h^{{{p},-}} must equal h^{{{p},{p}}}")

    @property
    def betti(self):
        return sum(self.hpq.values())

    def signs(self, p):
        """(h^{p,+}, h^{p,-}); defaults to a symmetric split when unspecified."""
        if p in self.hpm:
            return self.hpm[p]
        h = self.hpq.get((p, p), 0)
        if h % 2:
            raise ValueError(f"h^{{{p},+-}} must be given for odd h^{{{p},{p}}}")
        return h // 2, h // 2

    # constructors
    @classmethod
    def point(cls):
        return cls(0, {(0, 0): 1}, {0: (1, 0)})

    @classmethod
    def elliptic_h1(cls):
        return cls(1, {(1, 0): 1, (0, 1): 1})

    @classmethod
    def zero(cls, m=0):
        return cls(m, {})

    def to_json(self):
        return {"m": self.m, "hpq": {f"{p},{q}": h for (p, q), h in sorted(self.hpq.items())},
                "hpm": {str(p): list(v) for p, v in sorted(self.hpm.items())}}

    @classmethod
    def from_json(cls, data):
        """Accepts hpm as {"p": [h+, h-]} or {"p,+": h+, "p,-": h-}."""
        if isinstance(data, str):
            data = json.loads(data)
        hpq = {tuple(int(x) for x in k.split(",")): v for k, v in data.get("hpq", {}).items()}
        hpm = {}
        for k, v in data.get("hpm", {}).items():
            if "," in k:
                p, sign = k.split(",")
                cur = hpm.setdefault(int(p), [0, 0])
                cur[0 if sign.strip() == "+" else 1] = int(v)
            else:
                hpm[int(k)] = list(v)
        return cls(int(data["m"]), hpq, {p: tuple(v) for p, v in hpm.items()})


def local_factor(h, place, z):
    """Serre's archimedean factor L_v(H^m, z)."""
    z = complex(z)
    out = 1.0 + 0j
    if place in ("complex", "C"):
        for (p, q), n in h.hpq.items():
            out *= gamma_factor("C", z - min(p, q)) ** n
        return out
    if place not in ("real", "R"):
        raise ValueError(f"unknown place {place!r}")
    for (p, q), n in h.hpq.items():
        if p < q:
            out *= gamma_factor("C", z - p) ** n
    for p in {p for (p, q) in h.hpq if p == q}:
        plus, minus = h.signs(p)
        out *= gamma_factor("R", z - p) ** plus * gamma_factor("R", z - p + 1) ** minus
    return out


def _dlog_local(h, place, z):
    """d/dz log L_v(H^m, z)."""
    total = 0j
    if place in ("complex", "C"):
        for (p, q), n in h.hpq.items():
            total += n * _dlog_gamma_factor("C", z - min(p, q))
        return total
    for (p, q), n in h.hpq.items():
        if p < q:
            total += n * _dlog_gamma_factor("C", z - p)
    for p in {p for (p, q) in h.hpq if p == q}:
        plus, minus = h.signs(p)
        total += plus * _dlog_gamma_factor("R", z - p) + minus * _dlog_gamma_factor("R", z - p + 1)
    return total


def critical_point(h, s):
    return (1 + h.m) / 2 + 1j * s


def minus_two_dlog(h, place, s):
    """-2 d/ds Im log L_v(H^m, (1+m)/2 + i s) = -2 Re L'/L."""
    return -2.0 * complex(_dlog_local(h, place, critical_point(h, s))).real


# Weil group ----------------------------------------------------------------

@dataclass(frozen=True)
class WeilGroupElement:
    """u = w j^eps with w in C*."""
    w: complex
    eps: int = 0

    def __post_init__(self):
        if self.w == 0:
            raise ValueError("w must be nonzero")
        if self.eps not in (0, 1):
            raise ValueError("eps is 0 or 1")

    @property
    def module(self):
        return abs(self.w) ** 2

    def quaternion_distance(self):
        """|1 - u|_H: |1 - w|^2 on C*, 1 + |w|^2 on C* j."""
        return abs(1 - self.w) ** 2 if self.eps == 0 else 1 + abs(self.w) ** 2


def rep_trace(h, u):
    """Trace of the canonical representation of u on H^m.

    On C*: sum h^{p,q} w^-p wbar^-q.  On C* j only H^{p,p} contributes, where
    i^{2p} (w wbar)^-p F_inf has trace (h^{p,+} - h^{p,-}) (w wbar)^-p.
    """
    w = complex(u.w)
    if u.eps == 0:
        return sum(n * w ** -p * w.conjugate() ** -q for (p, q), n in h.hpq.items())
    total = 0j
    for p in {p for (p, q) in h.hpq if p == q}:
        plus, minus = h.signs(p)
        total += (plus - minus) * abs(w) ** (-2 * p)
    return total


# fiber integral and principal values ----------------------------------------

def f0(nu):
    return min(math.sqrt(nu), 1 / math.sqrt(nu))


def fiber_integral(n, nu):
    """(1/2 pi) int e^{i n theta} / |1 - e^{i theta} rho|^2 dtheta, rho^2 = nu."""
    if nu <= 0:
        raise ValueError("nu must be positive")
    if nu == 1:
        raise SingularityError("fiber integral diverges at nu = 1")
    return f0(nu) ** abs(n) / abs(1 - nu)


def fiber_integral_quad(n, nu, tol=1e-14):
    """Same integral by the periodic trapezoid rule, doubling until stable."""
    if nu == 1:
        raise SingularityError("fiber integral diverges at nu = 1")
    rho = math.sqrt(nu)
    k = 64
    prev = None
    while k <= 2 ** 20:
        theta = 2 * np.pi * np.arange(k) / k
        val = float(np.mean(np.cos(n * theta) / np.abs(1 - np.exp(1j * theta) * rho) ** 2))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        k *= 2
    raise ConvergenceError("periodic trapezoid did not settle")


@dataclass
class PrincipalValueSpec:
    """Integrand psi(nu) = nu^{1/2 + i s} f0(nu)^{|n|} / |1 - nu| of the C* fiber,
    or a custom ``psi_log(y)`` given in y = log nu."""
    n: int = 0
    s: float = 0.0
    scheme: str = "WeilCutoff"
    ladder: tuple = tuple(2 ** k for k in range(4, 13))
    psi_log: object = None


@dataclass
class PVResult:
    value: float
    error: float
    c_estimate: float = 1.0

    def __iter__(self):
        return iter((self.value, self.error))


def _psi_pair(spec):
    """psi at nu = e^{-x} and nu = e^{x}, accurate for small x > 0."""
    if spec.psi_log is not None:
        return lambda x: spec.psi_log(-x), lambda x: spec.psi_log(x)
    a = abs(spec.n) / 2
    z = 0.5 + 1j * spec.s

    def lower(x):
        return np.exp(-x * (z + a)) / -np.expm1(-x)

    def upper(x):
        return np.exp(x * (z - a - 1)) / -np.expm1(-x)
    return lower, upper


def _cutoff_integral(spec, t):
    """int (1 - f0^{2t}) psi d*nu, split at the scales 1/t and 1 in x = |log nu|."""
    lower, upper = _psi_pair(spec)

    def g(x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-t * x) * (lower(x) + upper(x))

    total = 0j
    for dom in ((0.0, 1.0 / t), (1.0 / t, 1.0), (1.0, math.inf)):
        total += integrate_adaptive(g, dom, tol=1e-14, rtol=1e-14).value
    return total


def _richardson(ts, vals):
    """Extrapolate vals(t) = L + c1/t + c2/t^2 + ... along a doubling ladder."""
    table = [list(vals)]
    for j in range(1, len(vals)):
        prev = table[-1]
        r = ts[j] / ts[j - 1]
        factor = r ** j
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1)
                      for i in range(len(prev) - 1)])
    best = [row[-1] for row in table]
    errs = [abs(best[k] - best[k - 1]) for k in range(1, len(best))]
    k = int(np.argmin(errs)) + 1
    return best[k], errs[k - 1]


def weil_pv(spec):
    """PF_0 int psi d*nu.  Returns (value, error) as a PVResult.

    WeilCutoff: 2 log(2 pi) c + lim (int (1 - f0^{2t}) psi d*nu - 2 c log t)
    with c = 1, extrapolated in 1/t.  MinimalSubtraction: the digamma form
    2 log 2 pi - psi(a) - psi(abar), a = 1/2 + |n|/2 + i s, whose constant is
    fixed by the n = 1, s = 0 identity.
    """
    if spec.scheme == "MinimalSubtraction":
        if spec.psi_log is not None:
            raise ValueError("minimal subtraction needs the (n, s) integrand")
        a = 0.5 + abs(spec.n) / 2 + 1j * spec.s
        val = 2 * LOG_2PI - digamma(a) - digamma(a.conjugate())
        return PVResult(complex(val).real, 1e-14)
    if spec.scheme != "WeilCutoff":
        raise ValueError(f"unknown scheme {spec.scheme!r}")
    ts = [float(t) for t in spec.ladder]
    raw = [_cutoff_integral(spec, t) for t in ts]
    c_est = float(((raw[-1] - raw[-2]) / (2 * math.log(ts[-1] / ts[-2]))).real)
    if abs(c_est - 1) > 1e-2:
        raise ConvergenceError(f"log-divergence coefficient {c_est:.4g} differs from 1")
    vals = [r - 2 * math.log(t) for r, t in zip(raw, ts)]
    lim, err = _richardson(ts, vals)
    if not err < 1e-6:
        raise ConvergenceError(f"ladder extrapolation unstable (error {err:.3g})")
    value = 2 * LOG_2PI + lim
    if abs(value.imag) > 1e-8 and spec.psi_log is None:
        raise ConvergenceError("imaginary part left over for a real integrand")
    return PVResult(value.real, float(err), c_est)


def pv_f0_over_f1():
    """PF_0 int f0 f1^-1 d*nu, expected 2(log 2 pi + gamma)."""
    def psi_log(y):
        y = np.abs(np.asarray(y, dtype=float))
        return np.exp(-y) / -np.expm1(-y)
    return weil_pv(PrincipalValueSpec(psi_log=psi_log))


# Lefschetz identities ----------------------------------------------------------

@dataclass
class LefschetzResult:
    lhs: float
    rhs: float

    @property
    def diff(self):
        return abs(self.lhs - self.rhs)

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.diff))


def lefschetz_complex(h, s, scheme="WeilCutoff"):
    """sum h^{p,q} Pfw(n = p - q, s) against -2 d/ds Im log L_C(H^m, z)."""
    lhs = sum(n * weil_pv(PrincipalValueSpec(p - q, s, scheme)).value
              for (p, q), n in h.hpq.items())
    return LefschetzResult(float(lhs), minus_two_dlog(h, "complex", s) if h.hpq else 0.0)


def j_part_integral(s, tol=1e-13):
    """int_{R+*} v^{1/2 + i s} / (1 + v) d*v (= pi at s = 0)."""
    return mellin_transform(lambda v: 1.0 / (1.0 + v), 0.5 + 1j * s, tol=tol).value


def lefschetz_real(h, s, scheme="WeilCutoff"):
    """Half the complex-place sum plus (k/2) int v^{z-p}/(1+v) d*v per H^{p,p}."""
    if not h.hpq:
        return LefschetzResult(0.0, 0.0)
    lhs = 0.5 * sum(n * weil_pv(PrincipalValueSpec(p - q, s, scheme)).value
                    for (p, q), n in h.hpq.items())
    jpart = None
    for p in {p for (p, q) in h.hpq if p == q}:
        plus, minus = h.signs(p)
        k = plus - minus
        if k:
            # z - p = 1/2 + i s on the critical line of H^{2p}
            jpart = j_part_integral(s) if jpart is None else jpart
            lhs += 0.5 * k * jpart.real
    return LefschetzResult(float(lhs), minus_two_dlog(h, "real", s))


# zero counting -------------------------------------------------------------------

def zero_count_average(h, places, E, symmetric=False, polar=None):
    """Average zero count from the archimedean factors.

    The raw quantity sum_v (1/pi) int_{-E}^{E} d/ds Im log L_v ds counts
    zeros with |Im| <= E.  By default half of it is returned, plus the
    polar term (1 for H^0, where the completed function has poles at 0 and
    1), which is the count of zeros with 0 < Im <= E.
    """
    if E <= 0:
        return 0.0

    def integrand(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        z = (1 + h.m) / 2 + 1j * s
        return np.array([sum(_dlog_local(h, v, zz).real for v in places) for zz in z])

    raw = integrate_adaptive(integrand, (-E, E), tol=1e-11).value.real / math.pi
    if symmetric:
        return raw
    if polar is None:
        polar = 1 if h.m == 0 and h.hpq else 0
    return raw / 2 + polar
