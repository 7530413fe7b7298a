"""Sawtooth function and an explicit Vaaler approximation.

The truncation at order H uses Vaaler's construction: the approximant

    psi*(t) = sum_{0 < |h| <= H} a_h e(th),
    a_h = -(2*pi*i*h)^(-1) * J(h/(H+1)),
    J(u) = pi*u*(1-|u|)*cot(pi*u) + |u|          (0 < |u| < 1),

is a tapered Fourier series of psi, and the pointwise error is majorized by
the nonnegative Fejer-type polynomial

    sum_{|h| <= H} b_h e(th),   b_h = (1 - |h|/(H+1)) / (2H+2).

These satisfy |a_h| <= 1/(2*pi*|h|) < 1/|h| and 0 <= b_h <= 1/(2H+2) < 1/H.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


def sawtooth(t):
    """psi(t) = t - floor(t) - 1/2, in [-1/2, 1/2); -1/2 exactly at integers."""
    t = float(t)
    return t - math.floor(t) - 0.5


def sawtooth_array(ts):
    ts = np.asarray(ts, dtype=np.float64)
    return ts - np.floor(ts) - 0.5


def _taper(u):
    """Vaaler's Fourier taper J(u) on (0, 1): decreases from 1 to 0."""
    return math.pi * u * (1.0 - u) / math.tan(math.pi * u) + u


@dataclass(frozen=True)
class VaalerApproximation:
    """Coefficient families (a_h, b_h) at truncation order H.

    a_coeffs maps h -> complex for 0 < |h| <= H (conjugate-symmetric, so the
    approximant is real); b_coeffs maps h -> nonnegative real for |h| <= H.
    """

    H: int
    a_coeffs: dict
    b_coeffs: dict

    def approximant(self, t):
        """sum over 0 < |h| <= H of a_h e(th)."""
        return sum(a * cmath.exp(2j * math.pi * h * t) for h, a in self.a_coeffs.items())

    def majorant(self, t):
        """sum over |h| <= H of b_h e(th); real and >= 0 by construction."""
        return sum(b * cmath.exp(2j * math.pi * h * t) for h, b in self.b_coeffs.items())


def vaaler_coefficients(H):
    """The explicit construction at order H (see module docstring)."""
    H = int(H)
    if H < 1:
        raise ValueError(f"H must be >= 1, got {H}")
    a = {}
    b = {0: 1.0 / (2 * H + 2)}
    for h in range(1, H + 1):
        ah = 1j * _taper(h / (H + 1)) / (2.0 * math.pi * h)
        a[h] = ah
        a[-h] = ah.conjugate()
        bh = (1.0 - h / (H + 1)) / (2 * H + 2)
        b[h] = bh
        b[-h] = bh
    return VaalerApproximation(H, a, b)


def vaaler_check(approx, t):
    """One sandwich evaluation: (|psi(t) - psi*(t)|, majorant(t)).

    The contract is lhs <= rhs + 1e-12, with equality attained at jump
    points of psi.
    """
    lhs = abs(sawtooth(t) - approx.approximant(t))
    rhs_c = approx.majorant(t)
    if abs(rhs_c.imag) > 1e-12:
        raise AssertionError(f"majorant not real at t={t}: {rhs_c}")
    return lhs, rhs_c.real


def vaaler_check_batch(approx, ts):
    """Vectorized sandwich over an array of t values -> (lhs, rhs) arrays.

    Uses the real form of both polynomials: the approximant is a sine
    series, the majorant a cosine series.
    """
    ts = np.asarray(ts, dtype=np.float64)
    H = approx.H
    hs = np.arange(1, H + 1, dtype=np.float64)
    # pair h, -h of a conjugate-symmetric series contributes
    # 2 Re(a_h) cos(2 pi h t) - 2 Im(a_h) sin(2 pi h t)
    a_cos = np.array([2.0 * approx.a_coeffs[h].real for h in range(1, H + 1)])
    a_sin = np.array([-2.0 * approx.a_coeffs[h].imag for h in range(1, H + 1)])
    b_cos = np.array([2.0 * approx.b_coeffs[h] for h in range(1, H + 1)])
    angles = 2.0 * math.pi * np.outer(ts, hs)
    cos_a = np.cos(angles)
    approxim = cos_a @ a_cos + np.sin(angles) @ a_sin
    rhs = approx.b_coeffs[0] + cos_a @ b_cos
    lhs = np.abs(sawtooth_array(ts) - approxim)
    return lhs, rhs
