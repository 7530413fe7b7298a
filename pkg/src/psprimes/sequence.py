"""Membership and prime counting for generalized Piatetski-Shapiro sequences.

The sequence with parameters (alpha, beta, c) is floor(alpha*n^c + beta) for
n = 1, 2, ...; with gamma = 1/c and theta = alpha^(-gamma) the number of n
mapping to a given value m (for m - beta > 0) is

    ceil(theta*(m+1-beta)^gamma) - ceil(theta*(m-beta)^gamma).

Ceilings are decided in binary64 with a guard band: values too close to an
integer are re-evaluated with 60-digit software floats, and a tie that
survives even that is surfaced as an ambiguity, never silently resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from ._util import chunked_sum

THEOREM_C_SUP = 12 / 11  # asymptotics proven for 1 < c < 12/11 (gamma > 11/12)

GUARD_BAND = 1e-9  # binary64 fractional parts this close to 0/1 get re-checked
TIE_EPS = mpmath.mpf("1e-30")  # still closer than this at 60 digits => ambiguous
_MP_DPS = 60


class WindowError(ValueError):
    """Parameters outside the validity window of the requested operation."""


class AmbiguousBoundaryError(ArithmeticError):
    """A floor/ceiling decision could not be made at 60 significant digits."""

    def __init__(self, value, target):
        self.value = value
        self.target = target
        super().__init__(
            f"cannot decide ceiling near {value}: within 1e-30 of integer {target}"
        )


@dataclass
class AmbiguityLog:
    """Collector for boundary ties; counted separately, never resolved."""

    events: list = field(default_factory=list)

    def record(self, value, target):
        self.events.append((value, target))

    def __len__(self):
        return len(self.events)


@dataclass(frozen=True)
class SequenceParams:
    """The tuple (alpha, beta, c) defining floor(alpha*n^c + beta)."""

    alpha: float = 1.0
    beta: float = 0.0
    c: float = 1.05

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")
        if not (self.c > 1 and math.isfinite(self.c)):
            raise ValueError(f"c must satisfy c > 1, got {self.c}")

    @property
    def gamma(self):
        """Inverse exponent 1/c, in (0, 1)."""
        return 1.0 / self.c

    @property
    def theta(self):
        """alpha^(-gamma), the density scale of the value set."""
        return self.alpha ** (-self.gamma)

    @property
    def theorem_mode(self):
        """True when the asymptotic formulas apply: alpha >= 1, 1 < c < 12/11."""
        return self.alpha >= 1 and self.c < THEOREM_C_SUP

    def require_theorem_mode(self):
        if self.alpha < 1:
            raise WindowError(f"theorem mode needs alpha >= 1, got {self.alpha}")
        if not self.c < THEOREM_C_SUP:
            raise WindowError(
                f"theorem mode needs c < 12/11 = {THEOREM_C_SUP:.6f}, got {self.c}"
            )
        return self


@dataclass(frozen=True)
class ResidueClass:
    """The progression n = a (mod q)."""

    q: int = 1
    a: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"modulus must be >= 1, got {self.q}")
        if not 0 <= self.a < self.q:
            raise ValueError(f"need 0 <= a < q, got a={self.a}, q={self.q}")

    @property
    def coprime(self):
        return math.gcd(self.a, self.q) == 1

    def require_coprime(self):
        if not self.coprime:
            raise WindowError(f"non-coprime class: gcd({self.a}, {self.q}) > 1")
        return self


def _ceil_checked(m, shift, params, ambiguity):
    """Ceiling of theta*(m+shift-beta)^gamma with a 60-digit re-check near integers.

    The one boundary case decidable exactly is m+shift-beta == alpha, where
    the scaled power is 1 regardless of c; it is recognized with rational
    arithmetic (binary64 inputs are exact dyadic rationals).
    """
    t = params.theta * (m + shift - params.beta) ** params.gamma
    band = max(GUARD_BAND, abs(t) * 4e-15)
    frac = t - math.floor(t)
    if band < frac < 1.0 - band:
        return math.ceil(t)
    base = Fraction(m) + shift - Fraction(params.beta)
    if base == Fraction(params.alpha):
        return 1
    with mpmath.workdps(_MP_DPS):
        g = 1 / mpmath.mpf(params.c)
        bm = mpmath.mpf(m) + shift - mpmath.mpf(params.beta)
        tm = bm**g / mpmath.mpf(params.alpha) ** g
        nearest = mpmath.nint(tm)
        if abs(tm - nearest) < TIE_EPS:
            if ambiguity is None:
                raise AmbiguousBoundaryError(float(tm), int(nearest))
            ambiguity.record(float(tm), int(nearest))
            return math.ceil(t)  # logged; provisional binary64 answer
        return int(mpmath.ceil(tm))


def _ceil_array(ms, shift, params, ambiguity):
    """Vectorized guarded ceiling of theta*(m+shift-beta)^gamma."""
    t = params.theta * np.power(ms + (shift - params.beta), params.gamma)
    out = np.ceil(t).astype(np.int64)
    frac = t - np.floor(t)
    band = np.maximum(GUARD_BAND, np.abs(t) * 4e-15)
    suspect = np.nonzero((frac <= band) | (frac >= 1.0 - band))[0]
    for i in suspect:
        out[i] = _ceil_checked(int(ms[i]), shift, params, ambiguity)
    return out


def _preimage_count_enumerate(m, params):
    """Direct enumeration for the small-m boundary (m - beta <= 0 region)."""
    count = 0
    n = 1
    while True:
        v = math.floor(params.alpha * n**params.c + params.beta)
        if v > m:
            return count
        if v == m:
            count += 1
        n += 1


def preimage_count(m, params, ambiguity=None):
    """Exact number of n >= 1 with floor(alpha*n^c + beta) = m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if m - params.beta <= 1:
        return _preimage_count_enumerate(m, params)
    hi = _ceil_checked(m, 1, params, ambiguity)
    lo = _ceil_checked(m, 0, params, ambiguity)
    return max(0, hi - max(lo, 1))


def is_member(m, params, ambiguity=None):
    """True iff m is a value of the sequence."""
    return preimage_count(m, params, ambiguity) >= 1


def member_mask(ms, params, ambiguity=None):
    """Vectorized membership for an array of candidate values.

    Values at or below the small-m boundary fall back to enumeration.
    """
    ms = np.asarray(ms, dtype=np.int64)
    mask = np.zeros(ms.shape, dtype=bool)
    small = ms.astype(np.float64) - params.beta <= 1
    for i in np.nonzero(small)[0]:
        mask[i] = _preimage_count_enumerate(int(ms[i]), params) >= 1
    big = ~small
    if np.any(big):
        vals = ms[big].astype(np.float64)
        hi = _ceil_array(vals, 1, params, ambiguity)
        lo = _ceil_array(vals, 0, params, ambiguity)
        mask[big] = hi - np.maximum(lo, 1) >= 1
    return mask


def enumerate_members(limit, params, ambiguity=None):
    """Sorted distinct sequence values <= limit, by direct enumeration over n.

    The independent route used to cross-check the ceiling formula: floors of
    alpha*n^c + beta are computed for every n, with the same guard-band and
    60-digit re-check discipline near integer boundaries.
    """
    if limit < 1:
        return np.empty(0, dtype=np.int64)
    # n is exhausted once alpha*n^c + beta > limit
    n_max = int(((limit + 1 - params.beta) / params.alpha) ** params.gamma) + 2
    ns = np.arange(1, n_max + 1, dtype=np.float64)
    v = params.alpha * ns**params.c + params.beta
    vals = np.floor(v).astype(np.int64)
    frac = v - np.floor(v)
    band = np.maximum(GUARD_BAND, np.abs(v) * 4e-15)
    for i in np.nonzero((frac <= band) | (frac >= 1.0 - band))[0]:
        n = int(ns[i])
        if n == 1:
            # 1^c = 1 exactly, so the value is alpha + beta: decide rationally
            vals[i] = math.floor(Fraction(params.alpha) + Fraction(params.beta))
            continue
        with mpmath.workdps(_MP_DPS):
            vm = mpmath.mpf(params.alpha) * mpmath.mpf(n) ** mpmath.mpf(
                params.c
            ) + mpmath.mpf(params.beta)
            nearest = mpmath.nint(vm)
            if abs(vm - nearest) < TIE_EPS:
                if ambiguity is None:
                    raise AmbiguousBoundaryError(float(vm), int(nearest))
                ambiguity.record(float(vm), int(nearest))
            vals[i] = int(mpmath.floor(vm))
    vals = np.unique(vals)
    return vals[(vals >= 1) & (vals <= limit)]


def pi_ap(x, rc, tables):
    """#{p <= x : p = a (mod q)}."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    tables.require_coverage(x)
    return int(tables.primes_in_class(x, rc.q, rc.a).size)


def theta_ap(x, rc, tables):
    """Chebyshev sum of log p over p <= x, p = a (mod q) (compensated)."""
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    logs = np.log(ps.astype(np.float64))
    return chunked_sum(lambda i, j: math.fsum(logs[i:j]), logs.size)


def pi_gps(x, params, rc, tables, ambiguity=None):
    """#{p <= x : p in the sequence and p = a (mod q)} (exact, membership per prime)."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    return int(np.count_nonzero(member_mask(ps, params, ambiguity)))


def theta_gps(x, params, rc, tables, ambiguity=None):
    """Sum of log p over member primes p <= x in the class (compensated)."""
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    sel = ps[member_mask(ps, params, ambiguity)].astype(np.float64)
    logs = np.log(sel)
    return chunked_sum(lambda i, j: math.fsum(logs[i:j]), logs.size)
