"""Main terms, decomposition pieces, and residual reports for member-prime counts.

The count of member primes up to x in a residue class decomposes as

    pi_gps(x) = sigma1(x) + sigma2(x) + O(x^(gamma-1)),

where sigma1 is the smooth density sum theta*gamma*sum p^(gamma-1) and
sigma2 the sawtooth correction sum.  sigma1 has an equivalent
partial-summation form (the main term of the asymptotic formula); the
integral there is evaluated exactly via the step structure of the prime
counting function, never by quadrature.  Residuals are normalized by
x^(7*gamma/13 + 11/26), the proven error exponent (with epsilon slack
reported separately, since the implied constants are not quantified).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from ._util import chunked_sum
from .sequence import ResidueClass, pi_ap, pi_gps, theta_ap, theta_gps

MAIN_TERM_CROSSCHECK_RTOL = 1e-9  # two evaluation routes must agree this well

CSV_HEADER = "x,pi_gps,sigma1,sigma2,main_term,residual,normalized_residual"


class ConsistencyError(AssertionError):
    """Two supposedly identical evaluation routes disagreed."""


def residual_exponent(gamma):
    """Error-term exponent 7*gamma/13 + 11/26 (epsilon excluded)."""
    return 7.0 * gamma / 13.0 + 11.0 / 26.0


def admissible_gamma_threshold():
    """Smallest admissible gamma, 11/12, as an exact rational.

    Verifies the fixed point 7*gamma/13 + 11/26 = gamma there, i.e. the
    error term only beats the trivial bound x^gamma for gamma > 11/12.
    """
    g = Fraction(11, 12)
    if Fraction(7, 13) * g + Fraction(11, 26) != g:
        raise ConsistencyError("fixed-point identity failed for 11/12")
    return g


def admissible_c_threshold():
    """Largest admissible c, the reciprocal 12/11."""
    return 1 / admissible_gamma_threshold()


def sigma1(x, params, rc, tables, threads=1):
    """theta*gamma * sum of p^(gamma-1) over p <= x, p = a (mod q)."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    g = params.gamma
    s = chunked_sum(
        lambda i, j: _kernels.power_sum(ps[i:j], None, g - 1.0), ps.size, threads
    )
    return params.theta * g * s


def sigma1_integral_form(x, params, rc, tables, threads=1):
    """Partial-summation form of sigma1.

    theta*gamma*x^(gamma-1)*pi(x;q,a) - theta*gamma*(gamma-1)*I with
    I = integral_2^x u^(gamma-2) pi(u;q,a) du evaluated exactly as
    sum_p (x^(gamma-1) - p^(gamma-1)) / (gamma-1) over the class primes.
    """
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    g = params.gamma
    xg = float(x) ** (g - 1.0)

    def part(i, j):
        return math.fsum((xg - ps[i:j].astype(np.float64) ** (g - 1.0)) / (g - 1.0))

    integral = chunked_sum(part, ps.size, threads)
    return params.theta * g * (xg * ps.size - (g - 1.0) * integral)


def sigma2(x, params, rc, tables, threads=1):
    """Sawtooth correction sum over class primes.

    sum_p psi(-theta*(p+1-beta)^gamma) - psi(-theta*(p-beta)^gamma).
    """
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    return chunked_sum(
        lambda i, j: _kernels.sawtooth_pair_sum(
            ps[i:j], None, params.theta, params.gamma, params.beta
        ),
        ps.size,
        threads,
    )


def correction_sum_primes(x, params, rc, tables, threads=1):
    """log-p weighted sawtooth correction sum over class primes."""
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    logs = np.log(ps.astype(np.float64))
    return chunked_sum(
        lambda i, j: _kernels.sawtooth_pair_sum(
            ps[i:j], logs[i:j], params.theta, params.gamma, params.beta
        ),
        ps.size,
        threads,
    )


def _prime_powers_in_class(x, q, a, tables):
    """Proper prime powers p^k <= x (k >= 2) in the class, with log p weights."""
    ns, ws = [], []
    for p in tables.primes(math.isqrt(int(x))):
        p = int(p)
        v = p * p
        while v <= x:
            if v % q == a:
                ns.append(v)
                ws.append(math.log(p))
            v *= p
    return np.asarray(ns, dtype=np.int64), np.asarray(ws, dtype=np.float64)


def correction_sum_vonmangoldt(x, params, rc, tables, threads=1):
    """Lambda-weighted sawtooth correction sum over n <= x in the class.

    Differs from the log-p sum only by proper prime powers, a contribution
    of size O(sqrt(x)).
    """
    base = correction_sum_primes(x, params, rc, tables, threads)
    ns, ws = _prime_powers_in_class(x, rc.q, rc.a, tables)
    if ns.size == 0:
        return base
    extra = _kernels.sawtooth_pair_sum(ns, ws, params.theta, params.gamma, params.beta)
    return base + extra


def _crosscheck(route_a, route_b, what):
    scale = max(1.0, abs(route_a))
    if abs(route_a - route_b) > MAIN_TERM_CROSSCHECK_RTOL * scale:
        raise ConsistencyError(
            f"{what}: routes disagree: {route_a!r} vs {route_b!r}"
        )


def main_term_pi(x, params, rc, tables, threads=1):
    """Main term of the member-prime count asymptotic.

    alpha^(-gamma)*gamma*x^(gamma-1)*pi(x;q,a) plus the exact step-function
    integral term.  Requires theorem mode (gamma > 11/12) and a coprime
    class.  Both evaluation routes (direct density sum and partial
    summation) are computed and must agree to 1e-9 relative.
    """
    params.require_theorem_mode()
    rc.require_coprime()
    direct = sigma1(x, params, rc, tables, threads)
    by_parts = sigma1_integral_form(x, params, rc, tables, threads)
    _crosscheck(direct, by_parts, "main_term_pi")
    return by_parts


def main_term_theta(x, params, rc, tables, threads=1):
    """Main term of the log-weighted (Chebyshev) member count.

    Same shape as main_term_pi with pi(u;q,a) replaced by the Chebyshev
    sum; the direct route is theta*gamma * sum p^(gamma-1) log p.
    """
    params.require_theorem_mode()
    rc.require_coprime()
    tables.require_coverage(x)
    ps = tables.primes_in_class(x, rc.q, rc.a)
    logs = np.log(ps.astype(np.float64))
    g = params.gamma
    direct = params.theta * g * chunked_sum(
        lambda i, j: _kernels.power_sum(ps[i:j], logs[i:j], g - 1.0), ps.size, threads
    )
    xg = float(x) ** (g - 1.0)
    theta_x = chunked_sum(lambda i, j: math.fsum(logs[i:j]), ps.size, threads)

    def part(i, j):
        return math.fsum(
            logs[i:j] * (xg - ps[i:j].astype(np.float64) ** (g - 1.0)) / (g - 1.0)
        )

    integral = chunked_sum(part, ps.size, threads)
    by_parts = params.theta * g * (xg * theta_x - (g - 1.0) * integral)
    _crosscheck(direct, by_parts, "main_term_theta")
    return by_parts


def corollary_density(x, params, tables, threads=1):
    """Density estimate x^gamma/(alpha^gamma log x) and its scaled error.

    Returns (estimate, (pi_gps - estimate) / (x^gamma / log^2 x)); the
    class is q = 1 implicitly.
    """
    if x < 3:
        raise ValueError(f"x must be >= 3, got {x}")
    g = params.gamma
    estimate = params.theta * float(x) ** g / math.log(x)
    rc = ResidueClass(1, 0)
    count = pi_gps(x, params, rc, tables)
    scale = float(x) ** g / math.log(x) ** 2
    return estimate, (count - estimate) / scale


@dataclass(frozen=True)
class CountReport:
    """One row of a residual study at height x."""

    x: float
    pi_gps_value: int
    sigma1: float
    sigma2: float
    main_term: float
    residual: float
    normalized_residual: float
    epsilon_slack: float = 0.0

    def csv_row(self):
        vals = (
            self.x,
            self.pi_gps_value,
            self.sigma1,
            self.sigma2,
            self.main_term,
            self.residual,
            self.normalized_residual,
        )
        return ",".join(f"{v:.17g}" for v in vals)


def count_report(x, params, rc, tables, threads=1, epsilon_slack=0.0):
    """Evaluate the full decomposition at x and package the residual."""
    count = pi_gps(x, params, rc, tables)
    s1 = sigma1(x, params, rc, tables, threads)
    s2 = sigma2(x, params, rc, tables, threads)
    main = main_term_pi(x, params, rc, tables, threads)
    residual = count - main
    norm = residual / float(x) ** (residual_exponent(params.gamma) + epsilon_slack)
    return CountReport(float(x), count, s1, s2, main, residual, norm, epsilon_slack)


def count_grid(xs, params, rc, tables, threads=1, epsilon_slack=0.0):
    """CountReport rows for a grid of heights (ascending order preserved)."""
    return [count_report(x, params, rc, tables, threads, epsilon_slack) for x in xs]


def reports_to_csv(reports):
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"


def fit_slope(xs, ys):
    """Least-squares slope of ys against xs (>= 5 points required)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 5:
        raise ValueError(f"slope fit needs >= 5 grid points, got {xs.size}")
    xm = xs - xs.mean()
    return float(np.dot(xm, ys - ys.mean()) / np.dot(xm, xm))


def residual_slope(reports):
    """Slope of log|residual| vs log x over a grid of CountReports.

    Grid points with residual exactly zero are impossible for fractional
    main terms, so the logs are always finite.
    """
    xs = [math.log(r.x) for r in reports]
    ys = [math.log(abs(r.residual)) for r in reports]
    return fit_slope(xs, ys)
