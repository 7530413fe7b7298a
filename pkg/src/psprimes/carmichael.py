"""Carmichael numbers, membership-restricted search, and the count-exponent algebra.

Detection uses the Korselt criterion (squarefree composite n with p-1
dividing n-1 for every prime factor p) after a vectorized base-2 Fermat
screen: every Carmichael number passes the screen, and the rare surviving
pseudoprimes are cheap to factor.  The exponent algebra mirrors the lower
bound x^(E*B + (1-B+B1)*(gamma-1)) for the number of Carmichael numbers
built from member primes, with the epsilon loss kept out of computed
values and reported as a separate slack knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .arith import factorize
from .sequence import AmbiguityLog, member_mask

DEFAULT_SMOOTHNESS_EXPONENT = 0.7039  # documented default for E; a free input

_SEGMENT = 1 << 22


def exponent_budget_cap(gamma):
    """Upper limit -11/26 + 6*gamma/13 for the B parameters."""
    return -11.0 / 26.0 + 6.0 * gamma / 13.0


@dataclass(frozen=True)
class CarmichaelParams:
    """Inputs (E, B, B1, gamma) of the count exponent E*B + (1-B+B1)*(gamma-1)."""

    E: float
    B: float
    B1: float
    gamma: float

    def __post_init__(self):
        if not 0 < self.E < 1:
            raise ValueError(f"E must lie in (0, 1), got {self.E}")
        if self.B1 > self.B:
            raise ValueError(f"need B1 <= B, got B1={self.B1} > B={self.B}")

    @property
    def admissible(self):
        """Strict window B1 < B < -11/26 + 6*gamma/13 of the lower-bound lemma."""
        return self.B1 < self.B < exponent_budget_cap(self.gamma)

    def require_admissible(self):
        if not self.admissible:
            raise ValueError(
                f"inadmissible: need B1 < B < {exponent_budget_cap(self.gamma):.6f}, "
                f"got B1={self.B1}, B={self.B}"
            )
        return self


def carmichael_count_exponent(cp, enforce_admissibility=False):
    """E*B + (1 - B + B1)*(gamma - 1), the count exponent without epsilon."""
    if enforce_admissibility:
        cp.require_admissible()
    return cp.E * cp.B + (1.0 - cp.B + cp.B1) * (cp.gamma - 1.0)


def gamma_threshold_for_E(E):
    """The gamma solving (-11/26 + 6*gamma/13)*E + gamma - 1 = 0.

    Closed form (26 + 11 E) / (26 + 12 E); positive count exponents at the
    boundary B = B1 -> cap require gamma above this threshold.
    """
    if not 0 < E <= 1:
        raise ValueError(f"E must lie in (0, 1], got {E}")
    if E == 1:
        return Fraction(37, 38)
    return (26.0 + 11.0 * E) / (26.0 + 12.0 * E)


def korselt_test(n, tables=None):
    """True iff n is composite, squarefree, and p-1 | n-1 for every prime p | n."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    fac = factorize(n, tables)
    if len(fac) == 1 and fac[0][1] == 1:
        return False  # prime
    if any(k > 1 for _, k in fac):
        return False
    return all((n - 1) % (p - 1) == 0 for p, _ in fac)


def enumerate_carmichael(limit, tables, threads=1):
    """Ascending list of all Carmichael numbers <= limit.

    Base-2 Fermat screen over odd n (vectorized, segmented), primality
    lookup against the tables, then the Korselt criterion on survivors.
    """
    limit = int(limit)
    if limit > 1_000_000_000:
        raise ValueError("desk-scale search capped at 1e9")
    tables.require_coverage(max(limit, 2))
    out = []
    for seg_lo in range(0, limit, _SEGMENT):
        seg_hi = min(seg_lo + _SEGMENT, limit)
        for n in _kernels.fermat_base2_survivors(seg_lo, seg_hi):
            n = int(n)
            if not tables.is_prime(n) and korselt_test(n, tables):
                out.append(n)
    return out


@dataclass(frozen=True)
class CarmichaelRecord:
    """One search hit with per-factor membership evidence."""

    n: int
    factors: tuple
    memberships: tuple
    ambiguous: tuple = ()

    def to_json_dict(self):
        return {
            "n": self.n,
            "factors": list(self.factors),
            "memberships": list(self.memberships),
            "ambiguous": list(self.ambiguous),
        }


def gps_carmichael_search(limit, params, tables, ambiguity=None, threads=1):
    """Carmichael numbers <= limit whose prime factors are all sequence members.

    Factors with undecidable membership are reported on the record and the
    record is excluded from the hits (never silently included); such
    records are returned in the second list.
    """
    hits = []
    flagged = []
    for n in enumerate_carmichael(limit, tables, threads):
        factors = tuple(p for p, _ in factorize(n, tables))
        local = AmbiguityLog()
        mask = member_mask(np.asarray(factors, dtype=np.int64), params, local)
        memberships = tuple(bool(v) for v in mask)
        if local.events:
            ambiguous = tuple(int(v) for v, _ in local.events)
            rec = CarmichaelRecord(n, factors, memberships, ambiguous)
            flagged.append(rec)
            if ambiguity is not None:
                for ev in local.events:
                    ambiguity.record(*ev)
            continue
        if all(memberships):
            hits.append(CarmichaelRecord(n, factors, memberships))
    return hits, flagged


def _greatest_prime_factor_table(x):
    """gpf[n] for 1 <= n <= x (gpf[1] = 1), by ascending prime marking."""
    flags = np.ones(x + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(x) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    gpf = np.ones(x + 1, dtype=np.int64)
    for p in np.nonzero(flags)[0]:
        gpf[p::p] = p
    return gpf


def smooth_shifted_prime_count(x, y, tables):
    """#{p <= x : greatest prime factor of p-1 is <= y} (p = 2 counts)."""
    x = int(x)
    if not 2 <= y <= x:
        raise ValueError(f"need 2 <= y <= x, got y={y}, x={x}")
    tables.require_coverage(x)
    ps = tables.primes(x)
    gpf = _greatest_prime_factor_table(x)
    return int(np.count_nonzero(gpf[ps - 1] <= y))
