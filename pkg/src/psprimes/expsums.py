"""Exponential-sum engine.

Weighted phase sums over integer ranges, second/third derivative-test
bounds, the Weyl-van der Corput amplification check, Type I/II bilinear
sums with their proven bounds, the Heath-Brown decomposition of the von
Mangoldt function, the factorization-range case classifier, and the
monomial-tradeoff optimizer used to pick truncation parameters.

All lemma bounds carry unspecified implied constants, so the callable
surface reports (value, bound) pairs; stability of fitted constants over
parameter grids is asserted in the test suite, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from ._util import ordered_map
from .arith import factorize, von_mangoldt
from .sequence import WindowError


# --------------------------------------------------------------------------
# phase sums over a dyadic integer range


@dataclass(frozen=True)
class PhaseSpec:
    """Phase theta'*n^gamma + xi*n over the integer range (a, b].

    The dyadic constraint b <= 2a is what the derivative-test bounds
    assume.  theta' in (0,1) is the windowed regime of the lemmas; 0 is
    accepted for degenerate/diagnostic sums (the derivative scales are
    then zero and the bounds refuse to evaluate).
    """

    theta_coeff: float
    gamma: float
    xi: float
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b <= self.a or self.b > 2 * self.a:
            raise ValueError(
                f"need 1 <= a < b <= 2a (dyadic range), got ({self.a}, {self.b}]"
            )
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not math.isfinite(self.theta_coeff) or not math.isfinite(self.xi):
            raise ValueError("theta_coeff and xi must be finite")

    @property
    def lambda2(self):
        """Scale of the second phase derivative on the range."""
        g = self.gamma
        return abs(g * (g - 1.0) * self.theta_coeff) * self.a ** (g - 2.0)

    @property
    def lambda3(self):
        """Scale of the third phase derivative on the range."""
        g = self.gamma
        return abs(g * (g - 1.0) * (g - 2.0) * self.theta_coeff) * self.a ** (g - 3.0)


def _vonmangoldt_support(a, b, tables):
    """Prime powers in (a, b] with their log-p weights."""
    tables.require_coverage(b)
    ps = tables.primes(b)
    ps = ps[ps > a]
    ns = [ps]
    ws = [np.log(ps.astype(np.float64))]
    for p in tables.primes(math.isqrt(b)):
        p = int(p)
        v = p * p
        while v <= b:
            if v > a:
                ns.append(np.array([v], dtype=np.int64))
                ws.append(np.array([math.log(p)]))
            v *= p
    ns = np.concatenate(ns)
    ws = np.concatenate(ws)
    order = np.argsort(ns, kind="stable")
    return ns[order], ws[order]


def phase_sum(spec, weights="unit", tables=None, threads=1):
    """sum of w(n) e(theta'*n^gamma + xi*n) over (a, b], compensated.

    weights: 'unit', 'log', 'von_mangoldt' (requires tables), or an
    explicit array of length b - a.
    """
    ns = np.arange(spec.a + 1, spec.b + 1, dtype=np.int64)
    if isinstance(weights, str):
        if weights == "unit":
            w = None
        elif weights == "log":
            w = np.log(ns.astype(np.float64))
        elif weights == "von_mangoldt":
            if tables is None:
                raise ValueError("von_mangoldt weights need arithmetic tables")
            ns, w = _vonmangoldt_support(spec.a, spec.b, tables)
        else:
            raise ValueError(f"unknown weight family {weights!r}")
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.size != ns.size:
            raise ValueError(f"weight array has {w.size} entries, range has {ns.size}")
    parts = ordered_map(
        lambda sl: _kernels.phase_sum(
            ns[sl[0] : sl[1]],
            None if w is None else w[sl[0] : sl[1]],
            spec.theta_coeff,
            spec.gamma,
            spec.xi,
        ),
        [(i, min(i + (1 << 18), ns.size)) for i in range(0, ns.size, 1 << 18)],
        threads,
    )
    return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))


def weighted_lambda_sum(x, H, params, xi, tables, threads=1):
    """sum over 1 <= h <= H of |sum_{x/2 < n <= x} Lambda(n) e(theta*h*n^gamma + xi*n)|."""
    if x < 4:
        raise ValueError(f"x must be >= 4, got {x}")
    if H < 1:
        raise ValueError(f"H must be >= 1, got {H}")
    ns, w = _vonmangoldt_support(math.floor(x / 2), math.floor(x), tables)

    def one_h(h):
        s = _kernels.phase_sum(ns, w, params.theta * h, params.gamma, xi)
        return abs(s)

    return math.fsum(ordered_map(one_h, range(1, H + 1), threads))


def derivative_test_bound(spec, order):
    """Formula value of the derivative-test bound for the spec's range.

    order='second': a*lambda2^(1/2) + lambda2^(-1/2);
    order='third':  a*lambda3^(1/6) + lambda3^(-1/3).
    """
    if order == "second":
        lam = spec.lambda2
        if lam == 0:
            raise ValueError("second-derivative scale is zero")
        return spec.a * lam**0.5 + lam**-0.5
    if order == "third":
        lam = spec.lambda3
        if lam == 0:
            raise ValueError("third-derivative scale is zero")
        return spec.a * lam ** (1.0 / 6.0) + lam ** (-1.0 / 3.0)
    raise ValueError(f"order must be 'second' or 'third', got {order!r}")


# --------------------------------------------------------------------------
# bilinear (Type I / Type II) sums


@dataclass(frozen=True)
class BilinearSumSpec:
    """Double sum over k in (K, 2K], l in (L, 2L] with coefficient families.

    b_kind declares the smooth-side shape: 'unit' or 'log' makes the sum
    Type I eligible, anything else ('general') is Type II.  Q is the shift
    budget of the Weyl-van der Corput step (1 <= Q < L).
    """

    K: int
    L: int
    H: int
    Q: int
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    b_kind: str = "unit"

    def __post_init__(self):
        if self.K < 1 or self.L < 1:
            raise ValueError("K and L must be positive")
        if self.H < 1:
            raise ValueError(f"H must be >= 1, got {self.H}")
        if not 1 <= self.Q:
            raise ValueError(f"Q must be >= 1, got {self.Q}")
        a = np.ascontiguousarray(self.a_coeffs, dtype=np.float64)
        b = np.ascontiguousarray(self.b_coeffs, dtype=np.float64)
        if a.size != self.K or b.size != self.L:
            raise ValueError(
                f"coefficient lengths ({a.size}, {b.size}) != (K, L) = ({self.K}, {self.L})"
            )
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "b_coeffs", b)

    @property
    def ks(self):
        return np.arange(self.K + 1, 2 * self.K + 1, dtype=np.int64)

    @property
    def ls(self):
        return np.arange(self.L + 1, 2 * self.L + 1, dtype=np.int64)


def make_bilinear_spec(K, L, H, Q=1, a="unit", b="unit", tables=None):
    """Convenience builder; 'unit', 'log', 'mobius', or explicit arrays."""

    def family(name, lo, count):
        vals = np.arange(lo + 1, lo + count + 1, dtype=np.int64)
        if isinstance(name, str):
            if name == "unit":
                return np.ones(count), name
            if name == "log":
                return np.log(vals.astype(np.float64)), name
            if name == "mobius":
                return (
                    np.array([mobius_cached(int(v)) for v in vals], dtype=np.float64),
                    "general",
                )
            raise ValueError(f"unknown coefficient family {name!r}")
        arr = np.asarray(name, dtype=np.float64)
        return arr, "general"

    a_arr, _ = family(a, K, K)
    b_arr, b_kind = family(b, L, L)
    return BilinearSumSpec(K, L, H, Q, a_arr, b_arr, b_kind)


@lru_cache(maxsize=1 << 16)
def mobius_cached(n):
    fac = factorize(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def _bilinear_value(spec, params, xi, threads=1):
    """sum over 0 < |h| <= H of |double sum| by direct evaluation."""

    def one_h(h):
        s_pos = _kernels.bilinear_phase_sum(
            spec.ks, spec.ls, spec.a_coeffs, spec.b_coeffs,
            params.theta * h, params.gamma, xi,
        )
        s_neg = _kernels.bilinear_phase_sum(
            spec.ks, spec.ls, spec.a_coeffs, spec.b_coeffs,
            -params.theta * h, params.gamma, xi,
        )
        return abs(s_pos) + abs(s_neg)

    return math.fsum(ordered_map(one_h, range(1, spec.H + 1), threads))


def _check_scale(spec, x):
    if not spec.K * spec.L <= x <= 4 * spec.K * spec.L:
        raise WindowError(
            f"KL = {spec.K * spec.L} not comparable to x = {x} (need KL <= x <= 4KL)"
        )


def type_I_sum(spec, x, params, xi=0.0, threads=1):
    """Type I bilinear sum: (direct value, proven bound).

    Requires smooth b-side ('unit' or 'log') and K <= sqrt(x); the bound is
    H^(7/6) x^(gamma/6+3/4) + H^(2/3) x^(1-gamma/3).
    """
    if spec.b_kind not in ("unit", "log"):
        raise WindowError(f"Type I needs unit or log b-side, got {spec.b_kind!r}")
    _check_scale(spec, x)
    if spec.K > math.sqrt(x):
        raise WindowError(f"Type I needs K <= sqrt(x): K={spec.K}, sqrt(x)={math.sqrt(x):.1f}")
    value = _bilinear_value(spec, params, xi, threads)
    g = params.gamma
    H = spec.H
    bound = H ** (7 / 6) * x ** (g / 6 + 3 / 4) + H ** (2 / 3) * x ** (1 - g / 3)
    return value, bound


def type_II_sum(spec, x, params, xi=0.0, threads=1):
    """Type II bilinear sum: (direct value, proven bound).

    Requires sqrt(x) <= K <= x^(19/25); the bound is
    H^(5/4) x^(gamma/4+5/8) + H^(3/4) x^(1-gamma/4) + H x^(22/25)
    + H^(7/6) x^(gamma/6+3/4).
    """
    _check_scale(spec, x)
    if not math.sqrt(x) <= spec.K <= x ** (19 / 25):
        raise WindowError(
            f"Type II needs sqrt(x) <= K <= x^(19/25): K={spec.K}, "
            f"window [{math.sqrt(x):.1f}, {x ** (19 / 25):.1f}]"
        )
    value = _bilinear_value(spec, params, xi, threads)
    g = params.gamma
    H = spec.H
    bound = (
        H ** (5 / 4) * x ** (g / 4 + 5 / 8)
        + H ** (3 / 4) * x ** (1 - g / 4)
        + H * x ** (22 / 25)
        + H ** (7 / 6) * x ** (g / 6 + 3 / 4)
    )
    return value, bound


def weyl_van_der_corput_check(spec, x, h, params, xi=0.0, threads=1):
    """Directly evaluate both sides of the Weyl-van der Corput amplification.

    Returns (lhs_sq, rhs) where lhs_sq = |double sum|^2 and
    rhs = K^2 L^2 / Q + (K L / Q) * sum over l ~ L, 0 < |q| <= Q of
    |sum_k e(theta*h*k^gamma*(l^gamma - (l+q)^gamma) - xi*k*q)|.
    The inequality lhs_sq <= C * rhs holds with a modest constant.
    """
    if spec.Q >= spec.L:
        raise ValueError(f"need Q < L, got Q={spec.Q}, L={spec.L}")
    if spec.K > 10_000 or spec.L > 10_000:
        raise ValueError("direct evaluation capped at K, L <= 10^4")
    s = _kernels.bilinear_phase_sum(
        spec.ks, spec.ls, spec.a_coeffs, spec.b_coeffs,
        params.theta * h, params.gamma, xi,
    )
    lhs_sq = abs(s) ** 2
    ks = spec.ks
    g = params.gamma

    def shifted_row(ell):
        total = 0.0
        for q in range(1, spec.Q + 1):
            for qq in (q, -q):
                coeff = params.theta * h * (ell**g - (ell + qq) ** g)
                total += abs(_kernels.phase_sum(ks, None, coeff, g, -xi * qq))
        return total

    inner = math.fsum(ordered_map(shifted_row, [float(l) for l in spec.ls], threads))
    K, L, Q = spec.K, spec.L, spec.Q
    rhs = K * K * L * L / Q + K * L / Q * inner
    return lhs_sq, rhs


# --------------------------------------------------------------------------
# Heath-Brown decomposition of the von Mangoldt function


@dataclass(frozen=True)
class HBDecomposition:
    """Explicit terms of the order-k decomposition of Lambda(n).

    terms holds (j, sign, binomial, factors) where factors is an ordered
    2j-tuple with product n and the last j entries <= z.
    """

    n: int
    k_order: int
    z: int
    terms: list

    def evaluate(self):
        total = 0.0
        for j, sign, binom, factors in self.terms:
            mu_prod = 1
            for f in factors[j:]:
                mu_prod *= mobius_cached(f)
            total += sign * binom * math.log(factors[0]) * mu_prod
        return total


def _require_hb_range(n, k_order, z):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if k_order < 1 or z < 1:
        raise ValueError("k_order and z must be >= 1")
    if n > 2 * z**k_order:
        raise ValueError(f"identity needs n <= 2 z^k = {2 * z ** k_order}, got n = {n}")


class _HBEvaluator:
    """Memoized recursive enumeration of ordered factorizations.

    tau(j, n) counts ordered j-tuples with product n; logsum(j, n) carries
    the log of the first factor; musum(j, n) restricts every factor to be
    <= z and weights by the Möbius product (zero factors pruned).
    """

    def __init__(self, z):
        self.z = z
        self._div = {}
        self._tau = {1: None}
        self._tau_c = {}
        self._log_c = {}
        self._mu_c = {}

    def divisors(self, n):
        d = self._div.get(n)
        if d is None:
            divs = [1]
            for p, k in factorize(n):
                divs = [dd * p**e for dd in divs for e in range(k + 1)]
            d = sorted(divs)
            self._div[n] = d
        return d

    def tau(self, j, n):
        if j == 1:
            return 1
        key = (j, n)
        v = self._tau_c.get(key)
        if v is None:
            v = sum(self.tau(j - 1, n // d) for d in self.divisors(n))
            self._tau_c[key] = v
        return v

    def logsum(self, j, n):
        if j == 1:
            return math.log(n)
        key = (j, n)
        v = self._log_c.get(key)
        if v is None:
            v = math.fsum(
                math.log(d) * self.tau(j - 1, n // d) for d in self.divisors(n) if d > 1
            )
            self._log_c[key] = v
        return v

    def musum(self, j, n):
        if j == 0:
            return 1 if n == 1 else 0
        key = (j, n)
        v = self._mu_c.get(key)
        if v is None:
            v = 0
            for d in self.divisors(n):
                if d > self.z:
                    break
                mu = mobius_cached(d)
                if mu:
                    v += mu * self.musum(j - 1, n // d)
            self._mu_c[key] = v
        return v


_hb_evaluators = {}


def hb_lambda(n, k_order, z, tables=None):
    """Right-hand side of the order-k decomposition identity for Lambda(n).

    Evaluated by recursive enumeration of ordered factorizations
    n = n_1 ... n_{2j} with the last j factors <= z, memoized across calls
    sharing the same z.  Equals von_mangoldt(n) whenever n <= 2 z^k.
    """
    _require_hb_range(n, k_order, z)
    ev = _hb_evaluators.get(z)
    if ev is None:
        ev = _hb_evaluators[z] = _HBEvaluator(z)
    total = 0.0
    sign = 1
    for j in range(1, k_order + 1):
        binom = math.comb(k_order, j)
        inner = math.fsum(
            ev.musum(j, v) * ev.logsum(j, n // v) for v in ev.divisors(n)
        )
        total += sign * binom * inner
        sign = -sign
    return total


def hb_decomposition(n, k_order, z, tables=None):
    """Explicit tuple listing of the decomposition (small n only)."""
    _require_hb_range(n, k_order, z)
    ev = _hb_evaluators.setdefault(z, _HBEvaluator(z))
    terms = []

    def tuples(n_free, n_con, m):
        """Ordered tuples: n_free unconstrained factors then n_con factors <= z."""
        if n_free == 0 and n_con == 0:
            if m == 1:
                yield ()
            return
        for d in ev.divisors(m):
            if n_free == 0 and d > z:
                break
            rest_gen = tuples(max(n_free - 1, 0), n_con if n_free else n_con - 1, m // d)
            for rest in rest_gen:
                yield (d,) + rest

    sign = 1
    for j in range(1, k_order + 1):
        binom = math.comb(k_order, j)
        for factors in tuples(j, j, n):
            terms.append((j, sign, binom, factors))
        sign = -sign
    return HBDecomposition(n, k_order, z, terms)


# --------------------------------------------------------------------------
# case classifier for six-fold factorization ranges


@dataclass(frozen=True)
class FactorizationCase:
    """Outcome of classifying a six-tuple of dyadic ranges against x."""

    case: str  # 'I', 'II_direct', or 'II_grouped'
    j: int | None
    r: int | None
    K: float
    L: float


def classify_factorization(N, x):
    """Assign a six-tuple of range sizes to its bilinear treatment.

    Case I: some N_j >= x^(1/2) (smallest such j picked); Case II direct:
    some N_j in [x^(6/25), x^(1/2)); Case II grouped: all N_j < x^(6/25),
    the largest r ranges are grouped until their product enters
    [x^(6/25), x^(1/2)) (2 <= r <= 5).  Cutoffs are applied as sharp
    inequalities.
    """
    N = [float(v) for v in N]
    if len(N) != 6:
        raise ValueError(f"need exactly six ranges, got {len(N)}")
    if any(v < 1 for v in N):
        raise ValueError("range sizes must be >= 1")
    prod = math.prod(N)
    if not x / 4 <= prod <= 4 * x:
        raise ValueError(f"product {prod:.4g} not within factor 4 of x = {x:.4g}")
    cap = (2 * x) ** (1 / 3)
    for idx in (3, 4, 5):
        if N[idx] > cap:
            raise ValueError(
                f"N_{idx + 1} = {N[idx]:.4g} exceeds (2x)^(1/3) = {cap:.4g}"
            )
    sqrt_x = x**0.5
    low = x ** (6 / 25)
    for j, v in enumerate(N):
        if v >= sqrt_x:
            return FactorizationCase("I", j + 1, None, prod / v, v)
    for j, v in enumerate(N):
        if low <= v < sqrt_x:
            return FactorizationCase("II_direct", j + 1, None, prod / v, v)
    ordered = sorted(N, reverse=True)
    prefix = 1.0
    for r, v in enumerate(ordered, start=1):
        prefix *= v
        if prefix >= low:
            if not 2 <= r <= 5:
                raise ValueError(f"grouping index r = {r} outside [2, 5]")
            return FactorizationCase("II_grouped", None, r, prod / prefix, prefix)
    raise ValueError("product below x^(6/25); ranges inconsistent with x")


# --------------------------------------------------------------------------
# monomial-tradeoff optimizer


@dataclass(frozen=True)
class MonomialBound:
    """Objective L(H) = sum A_i H^(a_i) + sum B_j H^(-b_j) on [H1, H2]."""

    growth_terms: tuple
    decay_terms: tuple
    H1: float
    H2: float

    def __post_init__(self):
        growth = tuple((float(A), float(a)) for A, a in self.growth_terms)
        decay = tuple((float(B), float(b)) for B, b in self.decay_terms)
        if not growth or not decay:
            raise ValueError("growth and decay term lists must be nonempty")
        if any(A <= 0 or a <= 0 for A, a in growth) or any(
            B <= 0 or b <= 0 for B, b in decay
        ):
            raise ValueError("all coefficients and exponents must be positive")
        if not 0 < self.H1 <= self.H2:
            raise ValueError(f"need 0 < H1 <= H2, got [{self.H1}, {self.H2}]")
        object.__setattr__(self, "growth_terms", growth)
        object.__setattr__(self, "decay_terms", decay)

    def evaluate(self, H):
        return math.fsum(A * H**a for A, a in self.growth_terms) + math.fsum(
            B * H**-b for B, b in self.decay_terms
        )

    def closed_bound(self):
        """Endpoint terms plus all pairwise balance terms."""
        ends = math.fsum(A * self.H1**a for A, a in self.growth_terms) + math.fsum(
            B * self.H2**-b for B, b in self.decay_terms
        )
        balance = math.fsum(
            math.exp((b * math.log(A) + a * math.log(B)) / (a + b))
            for A, a in self.growth_terms
            for B, b in self.decay_terms
        )
        return ends + balance


def srinivasan_optimize(mb):
    """Minimize the monomial objective on [H1, H2].

    Golden-section search on log H (the objective is convex there) with a
    final local grid polish.  Returns (H_opt, value, closed_bound); the
    guaranteed contract is value <= (m + n) * closed_bound for m growth
    and n decay terms.
    """
    closed = mb.closed_bound()
    if mb.H1 == mb.H2:
        value = mb.evaluate(mb.H1)
        h_opt = mb.H1
    else:
        lo, hi = math.log(mb.H1), math.log(mb.H2)
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        u1 = hi - inv_phi * (hi - lo)
        u2 = lo + inv_phi * (hi - lo)
        f1 = mb.evaluate(math.exp(u1))
        f2 = mb.evaluate(math.exp(u2))
        for _ in range(200):
            if hi - lo < 1e-13:
                break
            if f1 <= f2:
                hi, u2, f2 = u2, u1, f1
                u1 = hi - inv_phi * (hi - lo)
                f1 = mb.evaluate(math.exp(u1))
            else:
                lo, u1, f1 = u1, u2, f2
                u2 = lo + inv_phi * (hi - lo)
                f2 = mb.evaluate(math.exp(u2))
        center = 0.5 * (lo + hi)
        grid = np.clip(
            np.linspace(center - 1e-6, center + 1e-6, 41),
            math.log(mb.H1),
            math.log(mb.H2),
        )
        vals = [mb.evaluate(math.exp(u)) for u in grid]
        best = int(np.argmin(vals))
        h_opt = math.exp(float(grid[best]))
        value = vals[best]
    m = len(mb.growth_terms)
    n = len(mb.decay_terms)
    if value > (m + n) * closed * (1 + 1e-12):
        raise AssertionError(
            f"optimizer contract violated: {value} > {(m + n) * closed}"
        )
    return h_opt, value, closed
