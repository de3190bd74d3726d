import math

import numpy as np
import pytest

from qmcnet.errors import BaseMismatch, InvalidParams, NotPrime, ZeroInverse
from qmcnet.field import (
    Polynomial,
    PrimeField,
    digits_lsb,
    enumerate_span,
    gf_nullspace,
    gf_rank,
    gf_rref,
    gf_row_space_equal,
    is_prime,
    lucas_binomial,
    poly_space_iter,
)


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23}
    for k in range(2, 25):
        assert is_prime(k) == (k in primes)
    assert not is_prime(1)
    assert not is_prime(0)


def test_prime_field_requires_prime():
    with pytest.raises(NotPrime):
        PrimeField(12)


def test_field_arithmetic():
    f = PrimeField(7)
    a, c = f.element(3), f.element(5)
    assert (a + c).value == 1
    assert (a - c).value == 5
    assert (a * c).value == 1
    assert (-a).value == 4
    assert (a.inv() * a).value == 1
    with pytest.raises(ZeroInverse):
        f.element(0).inv()
    with pytest.raises(BaseMismatch):
        a + PrimeField(5).element(1)


def test_lucas_vs_binomial():
    # digitwise product agrees with the full binomial coefficient mod b
    for b in (2, 3, 5, 7):
        for i in range(31):
            for lam in range(i + 1):
                assert lucas_binomial(i, lam, b) == math.comb(i, lam) % b


def test_polynomial_ops():
    f5 = PrimeField(5)
    f = Polynomial((1, 2, 3), f5)  # 1 + 2z + 3z^2 over F_5
    g = Polynomial((4, 1), f5)
    assert (f + g).coeffs == (0, 3, 3)
    assert (f * g)(2) == (f(2) * g(2)) % 5
    assert f.degree == 2
    assert Polynomial((0,), f5).degree == -1
    assert f.scale(2).coeffs == (2, 4, 1)


def test_polynomial_eval_horner():
    f = Polynomial((3, 0, 1, 2), PrimeField(7))
    for x in range(7):
        assert f(x) == (3 + x**2 + 2 * x**3) % 7


def test_hasse_derivative_reduces_degree_and_leibniz():
    f5 = PrimeField(5)
    f = Polynomial((1, 4, 0, 2), f5)
    g = Polynomial((3, 1, 2), f5)
    # product rule: d^k(fg) = sum_(i+j=k) d^i f * d^j g
    def strip(coeffs):
        out = list(coeffs)
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    for k in range(5):
        lhs = (f * g).hasse_derivative(k)
        rhs = Polynomial((0,), f5)
        for i in range(k + 1):
            rhs = rhs + f.hasse_derivative(i) * g.hasse_derivative(k - i)
        assert strip(lhs.coeffs) == strip(rhs.coeffs)


def test_hasse_zeroth_is_identity():
    f = Polynomial((2, 0, 1), PrimeField(3))
    assert f.hasse_derivative(0).coeffs == f.coeffs


def test_poly_space_iter_counts_and_order():
    polys = list(poly_space_iter(2, PrimeField(3)))
    assert len(polys) == 9
    # index k has digits of k (least significant first) as coefficients
    assert polys[0].coeffs == (0, 0)
    assert polys[5].coeffs == (2, 1)  # 5 = 2 + 1*3


def test_gf_rref_and_rank():
    mat = np.array([[1, 2, 0], [2, 4, 1], [0, 0, 1]], dtype=np.int64)
    _, pivots = gf_rref(mat, 5)
    assert gf_rank(mat, 5) == 2
    assert pivots == [0, 2]


def test_nullspace_orthogonality():
    rng = np.random.default_rng(7)
    for b in (2, 3, 5):
        mat = rng.integers(0, b, size=(3, 6))
        ns = gf_nullspace(mat, b)
        assert ns.shape[0] == 6 - gf_rank(mat, b)
        assert not ((mat @ ns.T) % b).any()


def test_row_space_equal():
    a = np.array([[1, 0], [0, 1]], dtype=np.int64)
    c = np.array([[1, 1], [1, 2]], dtype=np.int64)
    assert gf_row_space_equal(a, c, 3)
    assert not gf_row_space_equal(a, np.array([[1, 1]]), 3)


def test_enumerate_span_is_whole_subspace():
    basis = np.array([[1, 0, 2], [0, 1, 1]], dtype=np.int64)
    words = enumerate_span(basis, 3)
    assert words.shape == (9, 3)
    seen = {tuple(w) for w in words}
    assert len(seen) == 9
    for u in range(3):
        for v in range(3):
            assert tuple((u * basis[0] + v * basis[1]) % 3) in seen


def test_digits_lsb_roundtrip():
    vals = np.arange(27)
    dig = digits_lsb(vals, 3, 3)
    rebuilt = dig[:, 0] + 3 * dig[:, 1] + 9 * dig[:, 2]
    assert (rebuilt == vals).all()
