import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from qmcnet.cs import CodeSpace, dual_code
from qmcnet.errors import InvalidParams, InvalidRange, NonTerminatingExpansion
from qmcnet.haar import HaarIndex, haar_eval
from qmcnet.nets import GeneratingMatrices, dual_set, generate_points
from qmcnet.walsh import (
    ThetaResult,
    fine_price_coeff,
    group_walsh_transform,
    haar_walsh_inner,
    interval_coeff_vector,
    residual_check,
    subgroup_char_sum,
    terminating_digits,
    theta,
    truncated_indicator_1d,
    v_gamma_lambda,
    walsh_eval,
    walsh_eval_1d,
    walsh_synthesis,
    word_index,
)


def hammersley_g(n, b=2):
    ident = np.eye(n, dtype=np.int64)
    return GeneratingMatrices(b, n, 2, np.stack([ident, np.fliplr(ident).copy()]))


def test_terminating_digits():
    assert terminating_digits(Fraction(3, 4), 2) == [1, 1]
    assert terminating_digits(Fraction(0), 5) == []
    with pytest.raises(NonTerminatingExpansion):
        terminating_digits(Fraction(1, 3), 2)


def test_walsh_eval_basics():
    assert walsh_eval_1d(0, Fraction(1, 3), 3) == 1
    # wal_1 in base 2 is the Rademacher function on half-intervals
    assert walsh_eval_1d(1, Fraction(1, 4), 2) == pytest.approx(1)
    assert walsh_eval_1d(1, Fraction(3, 4), 2) == pytest.approx(-1)
    with pytest.raises(InvalidParams):
        walsh_eval_1d(-1, Fraction(0), 2)


def test_walsh_orthonormality_on_grid():
    b, n = 3, 2
    grid = [Fraction(g, b**n) for g in range(b**n)]
    for s in range(b**n):
        for t in range(b**n):
            ip = sum(
                walsh_eval_1d(s, x, b) * walsh_eval_1d(t, x, b).conjugate()
                for x in grid
            ) / len(grid)
            assert abs(ip - (1.0 if s == t else 0.0)) < 1e-12


def test_walsh_group_character():
    # wal_t(x (+) y) = wal_t(x) wal_t(y) for digitwise addition mod b
    b, n = 3, 3
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = int(rng.integers(0, b**n))
        ax, ay = (int(v) for v in rng.integers(0, b**n, 2))
        az, mult, u, v = 0, 1, ax, ay
        for _ in range(n):
            az += ((u % b + v % b) % b) * mult
            u //= b
            v //= b
            mult *= b
        wx = walsh_eval_1d(t, Fraction(ax, b**n), b)
        wy = walsh_eval_1d(t, Fraction(ay, b**n), b)
        wz = walsh_eval_1d(t, Fraction(az, b**n), b)
        assert abs(wz - wx * wy) < 1e-12


def test_fine_price_t0_and_hand_value():
    assert fine_price_coeff(0, Fraction(3, 4), 2) == pytest.approx(0.75)
    assert fine_price_coeff(1, Fraction(3, 4), 2) == pytest.approx(0.25, abs=1e-15)


def test_fine_price_vs_transform_route():
    # the analysis transform of exact cell weights is an independent route
    rng = np.random.default_rng(3)
    for b in (2, 3):
        n = 3
        for _ in range(5):
            y = Fraction(int(rng.integers(0, b**4)), b**4)
            vec = interval_coeff_vector(y, b, n)
            for t in range(b**n):
                assert fine_price_coeff(t, y, b) == pytest.approx(
                    complex(vec[t]), abs=1e-12
                )


def test_truncated_indicator_mean_value():
    # the partial Walsh sum integrates to y over [0,1)
    b, n = 2, 3
    y = Fraction(5, 8)
    vals = [
        truncated_indicator_1d(y, n, Fraction(g, b**n), b) for g in range(b**n)
    ]
    assert sum(vals) / len(vals) == pytest.approx(float(y), abs=1e-12)


def test_synthesis_matches_pointwise_walsh():
    b, n = 3, 3
    rng = np.random.default_rng(5)
    coeffs = rng.normal(size=b**n) + 1j * rng.normal(size=b**n)
    grid_vals = walsh_synthesis(coeffs, b, n)
    for g in (0, 1, 7, 13, 26):
        direct = sum(
            coeffs[t] * walsh_eval_1d(t, Fraction(g, b**n), b)
            for t in range(b**n)
        )
        assert abs(grid_vals[g] - direct) < 1e-10


def test_theta_two_routes_agree():
    g = hammersley_g(3)
    p = generate_points(g)
    rng = np.random.default_rng(1)
    dual = dual_set(g)
    for _ in range(10):
        y = [Fraction(int(v), 2**4) for v in rng.integers(0, 2**4, 2)]
        res = theta(p, g, y, dual=dual)
        assert res.gap < 1e-12


def test_theta_closed_form_route_agrees():
    g = hammersley_g(2)
    p = generate_points(g)
    y = [Fraction(3, 8), Fraction(5, 8)]
    a = theta(p, g, y, method="transform")
    c = theta(p, g, y, method="closed_form")
    assert abs(a.dual_sum - c.dual_sum) < 1e-12


def test_residual_check_reports_finite_constant():
    g = hammersley_g(3)
    p = generate_points(g)
    rep = residual_check(p, g, sample_count=40, seed=0)
    assert rep.max_theta_gap < 1e-12
    assert math.isfinite(rep.max_scaled_residual)
    assert rep.samples == 40


def test_group_walsh_transform_is_scaled_involution():
    b, width = 3, 4
    rng = np.random.default_rng(2)
    f = rng.normal(size=b**width) + 1j * rng.normal(size=b**width)
    fh = group_walsh_transform(f, b, width)
    # applying the conjugate transform returns b^width f
    back = group_walsh_transform(fh.conjugate(), b, width).conjugate()
    assert np.allclose(back, f * b**width)


def test_poisson_summation_over_random_subspaces():
    # sum over C of f = (#C / b^w) sum over C-perp of f-hat
    b, width = 3, 4
    rng = np.random.default_rng(4)
    for _ in range(10):
        basis = rng.integers(0, b, size=(2, width))
        from qmcnet.field import gf_rank

        if gf_rank(basis, b) != 2:
            continue
        c = CodeSpace(b, 2, 2, basis)  # d=2, n=2 gives width 4
        f = rng.normal(size=b**width) + 1j * rng.normal(size=b**width)
        fh = group_walsh_transform(f, b, width)
        lhs = sum(f[word_index(w, b)] for w in c.words())
        dual = dual_code(c)
        rhs = sum(fh[word_index(w, b)] for w in dual.words()) * len(
            c.words()
        ) / b**width
        assert abs(lhs - rhs) < 1e-9


def test_subgroup_char_sum_indicator():
    basis = np.array([[1, 0, 1, 1], [0, 1, 1, 0]], dtype=np.int64)
    c = CodeSpace(2, 2, 2, basis)
    dual = dual_code(c)
    for w in dual.words():
        assert abs(subgroup_char_sum(c, w) - len(c.words())) < 1e-12
    assert abs(subgroup_char_sum(c, [1, 0, 0, 0])) < 1e-12


def test_v_gamma_lambda_identity_exhaustive_small():
    basis = np.array([[1, 0, 1, 1], [0, 1, 1, 0]], dtype=np.int64)
    c = CodeSpace(2, 2, 2, basis)
    for gamma in itertools.product(range(3), repeat=2):
        for lam in itertools.product(range(3), repeat=2):
            if any(l > g for l, g in zip(lam, gamma)):
                continue
            rep = v_gamma_lambda(c, gamma, lam)
            assert rep.identity_ok


def test_v_gamma_lambda_range_checks():
    basis = np.array([[1, 0, 1, 1], [0, 1, 1, 0]], dtype=np.int64)
    c = CodeSpace(2, 2, 2, basis)
    with pytest.raises(InvalidRange):
        v_gamma_lambda(c, (3, 0), (0, 0))
    with pytest.raises(InvalidRange):
        v_gamma_lambda(c, (1, 1), (2, 0))


def test_haar_walsh_inner_closed_form_vs_grid():
    b = 3
    for j, m, l in [(-1, 0, 1), (0, 0, 1), (1, 2, 2)]:
        idx = HaarIndex((j,), (m,), (l,))
        for alpha in range(b**3):
            grid = b**4
            direct = (
                sum(
                    haar_eval(idx, (Fraction(g, grid),), b)
                    * walsh_eval_1d(alpha, Fraction(g, grid), b).conjugate()
                    for g in range(grid)
                )
                / grid
            )
            assert abs(direct - haar_walsh_inner(idx, (alpha,), b)) < 1e-12


def test_haar_walsh_inner_support():
    # nonzero only when the digit length of alpha is exactly j + 1 with
    # leading digit l
    b = 3
    idx = HaarIndex((1,), (0,), (2,))
    hits = [a for a in range(b**3) if haar_walsh_inner(idx, (a,), b) != 0]
    assert hits == [a for a in range(3, 9) if (a // 3) % 3 == 2]
