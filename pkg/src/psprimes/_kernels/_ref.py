"""NumPy reference implementations of the hot numeric kernels.

The compiled backend (``_core.pyx``) mirrors these signatures exactly; this
module is the import-time fallback and the correctness reference for parity
tests.  All reductions are compensated (``math.fsum``) so results do not
depend on how callers chunk their inputs across worker threads.

Conventions shared by both backends:

* integer ranges are half-open on the left: ``(lo, hi]``, index ``i``
  corresponds to ``n = lo + 1 + i``;
* ``e(t) = exp(2*pi*i*t)`` and phases are reduced modulo 1 before calling
  the libm trig routines;
* the sawtooth is ``psi(t) = t - floor(t) - 1/2``.
"""

import math

import numpy as np

NAME = "reference"

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker two-product splitting constant
_BIG_N = 2.0**30


def sieve_range(lo, hi, base_primes):
    """Primality bitmap for (lo, hi] given all primes up to sqrt(hi)."""
    size = hi - lo
    out = np.ones(size, dtype=np.uint8)
    for p in np.asarray(base_primes, dtype=np.int64):
        p = int(p)
        start = max(p * p, ((lo // p) + 1) * p)
        if start > hi:
            continue
        out[start - lo - 1 :: p] = 0
    return out


def lpf_range(lo, hi, base_primes):
    """Least-prime-factor array for (lo, hi]; 0 means no factor <= sqrt(hi).

    Entries left at 0 are primes (their least factor is the number itself).
    Primes must be supplied in ascending order so the first write wins.
    """
    size = hi - lo
    out = np.zeros(size, dtype=np.int64)
    for p in np.asarray(base_primes, dtype=np.int64):
        p = int(p)
        start = ((lo // p) + 1) * p
        if start > hi:
            continue
        idx = np.arange(start - lo - 1, size, p)
        unset = idx[out[idx] == 0]
        out[unset] = p
    return out


def power_sum(ns, weights, exponent):
    """Compensated sum of w(n) * n**exponent."""
    terms = np.asarray(ns, dtype=np.float64) ** exponent
    if weights is not None:
        terms = terms * weights
    return math.fsum(terms)


def _psi(t):
    return t - np.floor(t) - 0.5


def sawtooth_pair_sum(ns, weights, theta, gamma, beta):
    """Compensated sum of w(n) * (psi(-theta*(n+1-beta)^gamma) - psi(-theta*(n-beta)^gamma))."""
    base = np.asarray(ns, dtype=np.float64)
    hi = -theta * (base + (1.0 - beta)) ** gamma
    lo = -theta * (base - beta) ** gamma
    terms = _psi(hi) - _psi(lo)
    if weights is not None:
        terms = terms * weights
    return math.fsum(terms)


def _two_prod(a, b):
    """Dekker two-product: a*b = p + err exactly (a scalar, b array)."""
    p = a * b
    a_hi = _SPLITTER * a - (_SPLITTER * a - a)
    a_lo = a - a_hi
    b_hi = _SPLITTER * b - (_SPLITTER * b - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, err


def _reduced_phase(ns, theta_coeff, gamma, xi):
    """theta' * n^gamma + xi * n reduced modulo 1.

    For n beyond 2^30 the two products are computed with a Dekker
    two-product so the rounding error of the multiply does not leak into
    the reduced phase.
    """
    nf = np.asarray(ns, dtype=np.float64)
    pw = nf**gamma
    if nf.size and float(nf.max()) > _BIG_N:
        p1, e1 = _two_prod(theta_coeff, pw)
        p2, e2 = _two_prod(xi, nf)
        ph = (p1 - np.floor(p1)) + (p2 - np.floor(p2)) + (e1 + e2)
    else:
        ph = theta_coeff * pw + xi * nf
    return ph - np.floor(ph)


def phase_sum(ns, weights, theta_coeff, gamma, xi):
    """Compensated complex sum of w(n) * e(theta'*n^gamma + xi*n)."""
    ph = 2.0 * math.pi * _reduced_phase(ns, theta_coeff, gamma, xi)
    re = np.cos(ph)
    im = np.sin(ph)
    if weights is not None:
        re = re * weights
        im = im * weights
    return complex(math.fsum(re), math.fsum(im))


def bilinear_phase_sum(ks, ls, a_coeffs, b_coeffs, theta_h, gamma, xi):
    """Double sum over k, l of a_k b_l e(theta_h*(k l)^gamma + xi*k*l).

    Evaluated row by row ((k l)^gamma = k^gamma * l^gamma); row partials
    are combined with fsum so the result is independent of chunking.
    """
    kf = np.asarray(ks, dtype=np.float64)
    lf = np.asarray(ls, dtype=np.float64)
    kg = kf**gamma
    lg = lf**gamma
    row_re = np.empty(kf.size, dtype=np.float64)
    row_im = np.empty(kf.size, dtype=np.float64)
    for i in range(kf.size):
        ph = theta_h * kg[i] * lg + xi * kf[i] * lf
        ph = 2.0 * math.pi * (ph - np.floor(ph))
        row_re[i] = a_coeffs[i] * math.fsum(b_coeffs * np.cos(ph))
        row_im[i] = a_coeffs[i] * math.fsum(b_coeffs * np.sin(ph))
    return complex(math.fsum(row_re), math.fsum(row_im))


def fermat_base2_survivors(lo, hi):
    """Odd n in (lo, hi] with 2^(n-1) == 1 (mod n), via vectorized powmod.

    This is the cheap pre-screen for Carmichael searches: every Carmichael
    number passes, almost every other composite fails.  Requires
    hi < 2^31.5 so the squarings stay inside int64.
    """
    if hi >= 3_000_000_000:
        raise ValueError("fermat screen limited to hi < 3e9 (int64 squarings)")
    start = lo + 1
    if start % 2 == 0:
        start += 1
    if start < 3:
        start = 3
    n = np.arange(start, hi + 1, 2, dtype=np.int64)
    if n.size == 0:
        return n
    e = n - 1
    result = np.ones_like(n)
    base = np.full_like(n, 2)
    bits = int(e.max()).bit_length()
    for j in range(bits):
        odd = (e >> j) & 1 == 1
        result[odd] = result[odd] * base[odd] % n[odd]
        base = base * base % n
    return n[result == 1]
