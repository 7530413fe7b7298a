# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: tight C loops behind the same surface as ``_ref``.

Sums use Kahan compensation, so compiled and reference backends agree to
roundoff (not bit-for-bit; the reference uses fsum).
"""

from libc.math cimport cos, sin, floor, pow, sqrt

import numpy as np

NAME = "compiled"

DEF TWO_PI = 6.283185307179586476925286766559
DEF SPLITTER = 134217729.0
DEF BIG_N = 1073741824.0


cdef struct KahanAcc:
    double s
    double c


cdef inline void kahan_add(KahanAcc *acc, double x) nogil:
    cdef double y = x - acc.c
    cdef double t = acc.s + y
    acc.c = (t - acc.s) - y
    acc.s = t


def sieve_range(long long lo, long long hi, base_primes):
    """Primality bitmap for (lo, hi] given all primes up to sqrt(hi)."""
    cdef long long size = hi - lo
    out_arr = np.ones(size, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    cdef long long[::1] primes = np.ascontiguousarray(base_primes, dtype=np.int64)
    cdef long long p, start, m
    cdef Py_ssize_t i
    with nogil:
        for i in range(primes.shape[0]):
            p = primes[i]
            start = p * p
            if ((lo // p) + 1) * p > start:
                start = ((lo // p) + 1) * p
            m = start
            while m <= hi:
                out[m - lo - 1] = 0
                m += p
    return out_arr


def lpf_range(long long lo, long long hi, base_primes):
    """Least-prime-factor array for (lo, hi]; 0 means prime (lpf = n)."""
    cdef long long size = hi - lo
    out_arr = np.zeros(size, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef long long[::1] primes = np.ascontiguousarray(base_primes, dtype=np.int64)
    cdef long long p, m
    cdef Py_ssize_t i
    with nogil:
        for i in range(primes.shape[0]):
            p = primes[i]
            m = ((lo // p) + 1) * p
            while m <= hi:
                if out[m - lo - 1] == 0:
                    out[m - lo - 1] = p
                m += p
    return out_arr


def power_sum(ns, weights, double exponent):
    """Compensated sum of w(n) * n**exponent."""
    cdef double[::1] nf = np.ascontiguousarray(ns, dtype=np.float64)
    cdef double[::1] w
    cdef KahanAcc acc
    acc.s = 0.0
    acc.c = 0.0
    cdef Py_ssize_t i
    if weights is None:
        with nogil:
            for i in range(nf.shape[0]):
                kahan_add(&acc, pow(nf[i], exponent))
    else:
        w = np.ascontiguousarray(weights, dtype=np.float64)
        with nogil:
            for i in range(nf.shape[0]):
                kahan_add(&acc, w[i] * pow(nf[i], exponent))
    return acc.s


cdef inline double psi(double t) nogil:
    return t - floor(t) - 0.5


def sawtooth_pair_sum(ns, weights, double theta, double gamma, double beta):
    """Compensated sum of w(n)*(psi(-theta*(n+1-beta)^gamma) - psi(-theta*(n-beta)^gamma))."""
    cdef double[::1] nf = np.ascontiguousarray(ns, dtype=np.float64)
    cdef double[::1] w
    cdef bint have_w = weights is not None
    if have_w:
        w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef KahanAcc acc
    acc.s = 0.0
    acc.c = 0.0
    cdef Py_ssize_t i
    cdef double term
    with nogil:
        for i in range(nf.shape[0]):
            term = psi(-theta * pow(nf[i] + 1.0 - beta, gamma)) \
                 - psi(-theta * pow(nf[i] - beta, gamma))
            if have_w:
                term *= w[i]
            kahan_add(&acc, term)
    return acc.s


cdef inline double two_prod_err(double a, double b, double p) nogil:
    cdef double a_hi = SPLITTER * a - (SPLITTER * a - a)
    cdef double a_lo = a - a_hi
    cdef double b_hi = SPLITTER * b - (SPLITTER * b - b)
    cdef double b_lo = b - b_hi
    return ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo


cdef inline double reduced_phase(double n, double theta_coeff, double gamma,
                                 double xi, bint wide) nogil:
    cdef double pw = pow(n, gamma)
    cdef double p1, p2, ph
    if wide:
        p1 = theta_coeff * pw
        p2 = xi * n
        ph = (p1 - floor(p1)) + (p2 - floor(p2)) \
            + two_prod_err(theta_coeff, pw, p1) + two_prod_err(xi, n, p2)
    else:
        ph = theta_coeff * pw + xi * n
    return ph - floor(ph)


def phase_sum(ns, weights, double theta_coeff, double gamma, double xi):
    """Compensated complex sum of w(n) * e(theta'*n^gamma + xi*n)."""
    cdef double[::1] nf = np.ascontiguousarray(ns, dtype=np.float64)
    cdef double[::1] w
    cdef bint have_w = weights is not None
    if have_w:
        w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef KahanAcc re, im
    re.s = re.c = im.s = im.c = 0.0
    cdef Py_ssize_t i
    cdef double ph, wt
    cdef bint wide = False
    for i in range(nf.shape[0]):
        if nf[i] > BIG_N:
            wide = True
            break
    with nogil:
        for i in range(nf.shape[0]):
            ph = TWO_PI * reduced_phase(nf[i], theta_coeff, gamma, xi, wide)
            wt = w[i] if have_w else 1.0
            kahan_add(&re, wt * cos(ph))
            kahan_add(&im, wt * sin(ph))
    return complex(re.s, im.s)


def bilinear_phase_sum(ks, ls, a_coeffs, b_coeffs, double theta_h,
                       double gamma, double xi):
    """Double sum over k, l of a_k b_l e(theta_h*(k l)^gamma + xi*k*l)."""
    cdef double[::1] kf = np.ascontiguousarray(ks, dtype=np.float64)
    cdef double[::1] lf = np.ascontiguousarray(ls, dtype=np.float64)
    cdef double[::1] a = np.ascontiguousarray(a_coeffs, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(b_coeffs, dtype=np.float64)
    cdef Py_ssize_t nk = kf.shape[0], nl = lf.shape[0]
    lg_arr = np.asarray(ls, dtype=np.float64) ** gamma
    cdef double[::1] lg = np.ascontiguousarray(lg_arr)
    cdef KahanAcc re, im
    re.s = re.c = im.s = im.c = 0.0
    cdef KahanAcc rre, rim
    cdef Py_ssize_t i, j
    cdef double kg, ph
    with nogil:
        for i in range(nk):
            kg = pow(kf[i], gamma)
            rre.s = rre.c = rim.s = rim.c = 0.0
            for j in range(nl):
                ph = theta_h * kg * lg[j] + xi * kf[i] * lf[j]
                ph = TWO_PI * (ph - floor(ph))
                kahan_add(&rre, b[j] * cos(ph))
                kahan_add(&rim, b[j] * sin(ph))
            kahan_add(&re, a[i] * rre.s)
            kahan_add(&im, a[i] * rim.s)
    return complex(re.s, im.s)


def fermat_base2_survivors(long long lo, long long hi):
    """Odd n in (lo, hi] with 2^(n-1) == 1 (mod n)."""
    if hi >= 3_000_000_000:
        raise ValueError("fermat screen limited to hi < 3e9 (int64 squarings)")
    cdef long long start = lo + 1
    if start % 2 == 0:
        start += 1
    if start < 3:
        start = 3
    if start > hi:
        return np.empty(0, dtype=np.int64)
    out_arr = np.empty((hi - start) // 2 + 1, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t count = 0
    cdef long long n, e, result, base
    with nogil:
        n = start
        while n <= hi:
            e = n - 1
            result = 1
            base = 2
            while e:
                if e & 1:
                    result = result * base % n
                base = base * base % n
                e >>= 1
            if result == 1:
                out[count] = n
                count += 1
            n += 2
    return out_arr[:count].copy()
