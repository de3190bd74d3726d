"""Independent reference computations used by several test modules.

These deliberately avoid the closed forms under test: coefficients are
obtained by exact piecewise integration over the cells where the integrands
are constant or linear, with Fraction endpoints (only the roots of unity are
floating point).
"""
from __future__ import annotations

import cmath
from fractions import Fraction

from qmcnet.haar import HaarIndex


def _omega(b: int, k: int) -> complex:
    return cmath.exp(2j * cmath.pi * (k % b) / b)


def volume_factor_1d(j: int, m: int, l: int, b: int) -> complex:
    """Integral of x * h_(j,m,l)(x) over [0,1), exact quadratic antiderivatives."""
    if j == -1:
        return complex(Fraction(1, 2))
    total = 0.0j
    for k in range(b):
        start = Fraction(m * b + k, b ** (j + 1))
        end = Fraction(m * b + k + 1, b ** (j + 1))
        total += _omega(b, l * k) * float((end * end - start * start) / 2)
    return total


def indicator_factor_1d(z: Fraction, j: int, m: int, l: int, b: int) -> complex:
    """Integral over x of chi_(z < x) * h_(j,m,l)(x), exact interval lengths."""
    z = Fraction(z)
    if j == -1:
        return complex(1 - z)
    total = 0.0j
    for k in range(b):
        start = Fraction(m * b + k, b ** (j + 1))
        end = Fraction(m * b + k + 1, b ** (j + 1))
        lo = max(start, z)
        if lo < end:
            total += _omega(b, l * k) * float(end - lo)
    return total


def haar_coeff_oracle(values_1d) -> complex:
    prod = 1.0 + 0.0j
    for v in values_1d:
        prod *= v
    return prod


def volume_coeff_oracle(idx: HaarIndex, b: int) -> complex:
    return haar_coeff_oracle(
        volume_factor_1d(j, m, l, b) for j, m, l in zip(idx.j, idx.m, idx.l)
    )


def indicator_coeff_oracle(z, idx: HaarIndex, b: int) -> complex:
    return haar_coeff_oracle(
        indicator_factor_1d(zi, j, m, l, b)
        for zi, j, m, l in zip(z, idx.j, idx.m, idx.l)
    )
