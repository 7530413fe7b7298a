"""Exact integer arithmetic substrate.

Segmented sieve tables, multiplicative functions (Möbius, von Mangoldt),
modular exponentiation, and 64-bit factorization (deterministic
Miller-Rabin + Pollard rho for numbers beyond the tables).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._util import ordered_map

SEGMENT_LENGTH = 1 << 20  # integers per sieve segment; bounds working memory

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # deterministic < 3.3e24


class CoverageError(ValueError):
    """Requested value lies outside the built table range."""


def _simple_sieve(limit):
    """All primes <= limit as an int64 array (plain Eratosthenes)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.nonzero(flags)[0].astype(np.int64)


@dataclass
class ArithmeticTables:
    """Sieve-backed primality (and optionally least-prime-factor) over (lo, hi].

    Immutable after construction; safe to share across threads.
    """

    lo: int
    hi: int
    primality: np.ndarray
    base_primes: np.ndarray
    least_prime_factor: np.ndarray | None = None
    _primes: np.ndarray | None = field(default=None, repr=False)

    def covers(self, n):
        return self.lo < n <= self.hi

    def require_coverage(self, x):
        if x > self.hi or self.lo > 1:
            raise CoverageError(
                f"tables cover ({self.lo}, {self.hi}], need (1, {x}]"
            )

    def is_prime(self, n):
        if not self.covers(n):
            raise CoverageError(f"{n} outside ({self.lo}, {self.hi}]")
        return bool(self.primality[n - self.lo - 1])

    def least_factor(self, n):
        """Smallest prime factor of n (n itself when n is prime)."""
        if self.least_prime_factor is None:
            raise ValueError("tables built without factor support")
        if not self.covers(n):
            raise CoverageError(f"{n} outside ({self.lo}, {self.hi}]")
        p = int(self.least_prime_factor[n - self.lo - 1])
        return p if p else n

    def primes(self, upper=None):
        """Primes in (lo, min(hi, upper)] as an ascending array."""
        if self._primes is None:
            self._primes = (np.nonzero(self.primality)[0] + self.lo + 1).astype(np.int64)
        ps = self._primes
        if upper is not None:
            if upper > self.hi:
                raise CoverageError(f"{upper} beyond table end {self.hi}")
            ps = ps[: np.searchsorted(ps, upper, side="right")]
        return ps

    def primes_in_class(self, x, q, a):
        """Primes p <= x with p = a (mod q)."""
        ps = self.primes(x)
        if q == 1:
            return ps
        return ps[ps % q == a]


def build_tables(lo, hi, with_factors=False, threads=1, cache_dir=None):
    """Segmented sieve of (lo, hi]; optional least-prime-factor array.

    Sieve segments (SEGMENT_LENGTH integers each) are independent, so the
    build is data-parallel; the merged output is deterministic.  When
    ``cache_dir`` (or PSPRIMES_CACHE_DIR) names a directory, the finished
    arrays are cached keyed by (lo, hi).
    """
    lo = int(lo)
    hi = int(hi)
    if lo < 1 or hi <= lo:
        raise ValueError(f"range-order violation: need 1 <= lo < hi, got ({lo}, {hi})")
    base = _simple_sieve(math.isqrt(hi))
    cache_dir = cache_dir or os.environ.get("PSPRIMES_CACHE_DIR")
    tag = f"{lo}_{hi}"
    if cache_dir:
        ppath = os.path.join(cache_dir, f"sieve_{tag}.npy")
        fpath = os.path.join(cache_dir, f"lpf_{tag}.npy")
        if os.path.exists(ppath) and (not with_factors or os.path.exists(fpath)):
            primality = np.load(ppath)
            lpf = np.load(fpath) if with_factors else None
            return ArithmeticTables(lo, hi, primality, base, lpf)

    bounds = [(s, min(s + SEGMENT_LENGTH, hi)) for s in range(lo, hi, SEGMENT_LENGTH)]
    seg_prim = ordered_map(lambda b: _kernels.sieve_range(b[0], b[1], base), bounds, threads)
    primality = np.concatenate(seg_prim).view(bool)
    lpf = None
    if with_factors:
        seg_lpf = ordered_map(lambda b: _kernels.lpf_range(b[0], b[1], base), bounds, threads)
        lpf = np.concatenate(seg_lpf)
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        np.save(os.path.join(cache_dir, f"sieve_{tag}.npy"), primality)
        if with_factors:
            np.save(os.path.join(cache_dir, f"lpf_{tag}.npy"), lpf)
    return ArithmeticTables(lo, hi, primality, base, lpf)


def powmod(a, e, n):
    """a^e mod n by square-and-multiply (wide intermediates are free in Python)."""
    if n < 2:
        raise ValueError(f"modulus must be >= 2, got {n}")
    if e < 0:
        raise ValueError("negative exponent")
    result = 1
    base = a % n
    while e:
        if e & 1:
            result = result * base % n
        base = base * base % n
        e >>= 1
    return result


def is_prime_u64(n):
    """Deterministic Miller-Rabin for n < 3.3e24 (covers 64-bit inputs)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n):
    """One nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        y, c, m = seed, seed + 1, 128
        g, r, q = 1, 1, 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n, tables=None):
    """Prime factorization as a sorted list of (p, exponent).

    Uses the least-prime-factor table when it covers n, otherwise trial
    division by small primes followed by Pollard rho (64-bit scope).
    """
    if n < 1:
        raise ValueError(f"positive integer required, got {n}")
    if n == 1:
        return []
    out = {}
    if tables is not None and tables.least_prime_factor is not None and tables.covers(n):
        m = n
        while m > 1:
            p = tables.least_factor(m)
            out[p] = out.get(p, 0) + 1
            m //= p
        return sorted(out.items())
    m = n
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime_u64(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return sorted(out.items())


def mobius(n, tables=None):
    """Möbius function: 0 on non-squarefree n, else (-1)^(number of prime factors)."""
    if n < 1:
        raise ValueError(f"positive integer required, got {n}")
    if n == 1:
        return 1
    fac = factorize(n, tables)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def von_mangoldt(n, tables=None):
    """log p when n is a prime power p^k, else 0 (binary64 value)."""
    if n < 1:
        raise ValueError(f"positive integer required, got {n}")
    if n == 1:
        return 0.0
    fac = factorize(n, tables)
    if len(fac) == 1:
        return math.log(fac[0][0])
    return 0.0
