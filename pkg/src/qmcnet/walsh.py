"""The b-adic Walsh system and the group-theoretic cross-check lemmas.

Fine-Price coefficients of interval indicators, the truncated-series
decomposition of the discrepancy function into a dual-set sum plus a small
residual, Walsh transforms on the group F_b^(d n), and the V_(gamma,lambda)
counting identities.  These run at desk scale and serve mainly as oracles for
the Haar-side computations.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cs import CodeSpace, dual_code, nrt_weight, v_weight
from .errors import InvalidParams, InvalidRange, NonTerminatingExpansion, SizeOverflow
from .field import enum_limit
from .haar import HaarIndex
from .nets import DualSet, GeneratingMatrices, PointSet, dual_set

GROUP_TABLE_LIMIT = 2**24


def _root(b: int, k: int) -> complex:
    return cmath.exp(2j * cmath.pi * (k % b) / b)


def terminating_digits(y: Fraction, b: int) -> list[int]:
    """Base-b digits y_1, y_2, ... (most significant first) of a terminating y."""
    y = Fraction(y)
    if not 0 <= y < 1:
        raise InvalidParams("y must lie in [0, 1)")
    digits = []
    while y:
        y *= b
        digits.append(math.floor(y))
        y -= math.floor(y)
        if len(digits) > 64 and y:
            raise NonTerminatingExpansion(
                "coordinate has no terminating base-b expansion"
            )
    return digits


def walsh_eval_1d(alpha: int, x: Fraction, b: int) -> complex:
    """wal_alpha(x) = exp(2 pi i / b * sum_nu alpha_nu x_(nu+1))."""
    if alpha < 0:
        raise InvalidParams("alpha must be nonnegative")
    if alpha == 0:
        return 1.0 + 0.0j
    digits = terminating_digits(x, b)
    exponent = 0
    nu = 0
    while alpha:
        tau = alpha % b
        if tau and nu < len(digits):
            exponent += tau * digits[nu]
        alpha //= b
        nu += 1
    return _root(b, exponent)


def walsh_eval(alpha: Sequence[int], x: Sequence[Fraction], b: int) -> complex:
    """Tensor-product Walsh function at a terminating point."""
    value = 1.0 + 0.0j
    for a, xi in zip(alpha, x):
        value *= walsh_eval_1d(a, xi, b)
    return value


def fine_price_coeff(t: int, y: Fraction, b: int) -> complex:
    """Walsh coefficient of chi_[0,y): integral over [0, y) of conj(wal_t).

    Exact for terminating y: the infinite part of the Fine-Price series
    stabilizes once the digits of y run out and is summed in closed form
    (sum over z of 1/(omega^z - 1) equals -(b-1)/2).
    """
    y = Fraction(y)
    if t < 0:
        raise InvalidParams("t must be nonnegative")
    if t == 0:
        return complex(y)
    digits = terminating_digits(y, b)
    big_m = len(digits)
    rho = nrt_weight(t, b)
    tau = (t // b ** (rho - 1)) % b
    t_prime = t - tau * b ** (rho - 1)

    wal_tp = walsh_eval_1d(t_prime, y, b)
    wal_t = walsh_eval_1d(t, y, b)

    total = (1.0 / (1.0 - _root(b, -tau))) * wal_tp.conjugate()
    total += (1.0 / (_root(b, -tau) - 1.0) + 0.5) * wal_t.conjugate()

    # explicit terms while digit y_(rho+a) may be nonzero, then the closed tail
    a_max = max(big_m - rho, 0)
    series = 0.0j
    for a in range(1, a_max + 1):
        y_digit = digits[rho + a - 1] if rho + a - 1 < big_m else 0
        for z in range(1, b):
            term = _root(b, -(z * y_digit)) * wal_t.conjugate()
            series += term / (b**a * (_root(b, z) - 1.0))
    series += -wal_t.conjugate() * float(b) ** (-a_max) / 2.0
    total += series
    return total / b**rho


def truncated_indicator_1d(y: Fraction, n: int, x: Fraction, b: int) -> complex:
    """Partial Walsh sum sum_(t < b^n) chi_hat(t) wal_t(x)."""
    return sum(
        fine_price_coeff(t, y, b) * walsh_eval_1d(t, x, b) for t in range(b**n)
    )


def truncated_indicator(
    y: Sequence[Fraction], n: int, x: Sequence[Fraction], b: int
) -> complex:
    """Tensor product of the 1-d truncated indicator expansions."""
    value = 1.0 + 0.0j
    for yi, xi in zip(y, x):
        value *= truncated_indicator_1d(yi, n, xi, b)
    return value


# --- fast transforms on the b^n grid -------------------------------------------


def walsh_synthesis(coeffs: np.ndarray, b: int, n: int) -> np.ndarray:
    """Evaluate sum_t coeffs[t] wal_t at every grid point g / b^n.

    Radix-b tensor transform: digit nu of t (LSB first) pairs with digit
    nu+1 of the point (MSB first).  O(n b^(n+1)) instead of O(b^(2n)).
    """
    w = np.exp(2j * np.pi * np.outer(np.arange(b), np.arange(b)) / b)
    # tensor axes ordered (tau_0, ..., tau_(n-1)) with tau_0 varying slowest
    # after this reshape of the index t = sum tau_nu b^nu: axis k <-> tau_(n-1-k)
    a = np.asarray(coeffs, dtype=complex).reshape((b,) * n)
    for axis in range(n):
        a = np.tensordot(w, a, axes=([1], [axis]))
        a = np.moveaxis(a, 0, axis)
    # axis k now carries grid digit x_(n-k): reorder so axis 0 is x_1 (MSB)
    a = np.transpose(a, axes=tuple(range(n - 1, -1, -1)))
    return a.reshape(-1)


def interval_coeff_vector(y: Fraction, b: int, n: int) -> np.ndarray:
    """chi_hat_[0,y)(t) for all t < b^n via one analysis transform.

    For t < b^n, conj(wal_t) is constant on cells of width b^-n, so the
    integral over [0, y) is a weighted character sum over cells.
    """
    y = Fraction(y)
    scaled = y * b**n
    g = math.floor(scaled)
    theta = scaled - g
    weights = np.zeros(b**n, dtype=complex)
    weights[:g] = 1.0
    if g < b**n and theta:
        weights[g] = float(theta)
    weights /= float(b) ** n
    # analysis with conj(wal): same tensor transform with conjugated matrix
    w = np.exp(-2j * np.pi * np.outer(np.arange(b), np.arange(b)) / b)
    a = weights.reshape((b,) * n)  # axis k <-> grid digit x_(k+1)
    # pair grid digit x_(nu+1) (axis nu) with tau_nu
    for axis in range(n):
        a = np.tensordot(w, a, axes=([1], [axis]))
        a = np.moveaxis(a, 0, axis)
    # axis nu now carries tau_nu; flatten with tau_0 least significant
    a = np.transpose(a, axes=tuple(range(n - 1, -1, -1)))
    return a.reshape(-1)


# --- Theta / R decomposition ----------------------------------------------------


@dataclass(frozen=True)
class ThetaResult:
    dual_sum: complex
    definition_sum: complex

    @property
    def gap(self) -> float:
        return abs(self.dual_sum - self.definition_sum)


def theta(
    p: PointSet,
    g: GeneratingMatrices,
    y: Sequence[Fraction],
    dual: DualSet | None = None,
    method: str = "transform",
) -> ThetaResult:
    """Theta_P(y) by its two routes, which must agree.

    dual_sum:        sum of chi_hat(t) over the nonzero dual set.
    definition_sum:  mean of the truncated indicator over the net minus the
                     volume of [0, y).
    """
    b, n = p.b, p.n
    y = [Fraction(v) for v in y]
    if dual is None:
        dual = dual_set(g)
    if method == "transform":
        vecs = [interval_coeff_vector(yi, b, n) for yi in y]
    elif method == "closed_form":
        vecs = None
    else:
        raise InvalidParams(f"unknown method {method!r}")

    dual_total = 0.0j
    for t in dual.elements:
        if vecs is not None:
            term = 1.0 + 0.0j
            for i, ti in enumerate(t):
                term *= vecs[i][ti]
        else:
            term = 1.0 + 0.0j
            for i, ti in enumerate(t):
                term *= fine_price_coeff(ti, y[i], b)
        dual_total += term

    # definition route: truncated indicator synthesized on the b^n grid
    grids = [
        walsh_synthesis(interval_coeff_vector(yi, b, n), b, n) for yi in y
    ]
    prod = np.ones(p.size, dtype=complex)
    for i in range(p.d):
        prod *= grids[i][p.numerators[:, i]]
    volume = 1.0
    for yi in y:
        volume *= float(yi)
    definition = complex(prod.sum() / p.size - volume)
    return ThetaResult(dual_total, definition)


def disc_values(p: PointSet, ys: Sequence[Sequence[Fraction]]) -> np.ndarray:
    """D_P at each y: exact counting on numerators, volume as float."""
    out = np.empty(len(ys))
    denom = p.denominator
    for k, y in enumerate(ys):
        inside = np.ones(p.size, dtype=bool)
        volume = 1.0
        for i in range(p.d):
            yi = Fraction(y[i])
            inside &= p.numerators[:, i] * yi.denominator < yi.numerator * denom
            volume *= float(yi)
        out[k] = inside.sum() / p.size - volume
    return out


@dataclass(frozen=True)
class ResidualReport:
    max_scaled_residual: float  # sup |R(y)| * b^n over the sample
    max_theta_gap: float
    samples: int


def residual_check(
    p: PointSet,
    g: GeneratingMatrices,
    sample_count: int = 1000,
    seed: int = 0,
) -> ResidualReport:
    """Empirical constant in |R_P(y)| <= c b^-n over a seeded sample grid.

    Samples y from the b^(n+1) grid; R = D - Theta with Theta via the dual
    sum (transform route), and the two Theta routes compared per sample.
    """
    b, n = p.b, p.n
    rng = np.random.default_rng(seed)
    grid = b ** (n + 1)
    dual = dual_set(g)
    max_resid = 0.0
    max_gap = 0.0
    ys = rng.integers(0, grid, size=(sample_count, p.d))
    dvals = disc_values(p, [[Fraction(int(v), grid) for v in row] for row in ys])
    for k in range(sample_count):
        y = [Fraction(int(v), grid) for v in ys[k]]
        th = theta(p, g, y, dual=dual)
        resid = abs(dvals[k] - th.dual_sum)
        max_resid = max(max_resid, resid)
        max_gap = max(max_gap, th.gap)
    return ResidualReport(
        max_scaled_residual=max_resid * b**n,
        max_theta_gap=max_gap,
        samples=sample_count,
    )


# --- group Walsh transform and counting lemmas ----------------------------------


def group_walsh_transform(table: np.ndarray, b: int, width: int) -> np.ndarray:
    """f_hat(B) = sum_A exp(2 pi i A.B / b) f(A) on F_b^width, dense table.

    Tensor transform per digit; the table is indexed by the mixed-radix word
    with the first digit most significant.
    """
    size = b**width
    if size > GROUP_TABLE_LIMIT:
        raise SizeOverflow(f"group table b^{width} exceeds {GROUP_TABLE_LIMIT}")
    table = np.asarray(table, dtype=complex)
    if table.size != size:
        raise InvalidParams("table size must be b**width")
    w = np.exp(2j * np.pi * np.outer(np.arange(b), np.arange(b)) / b)
    a = table.reshape((b,) * width)
    for axis in range(width):
        a = np.tensordot(w, a, axes=([1], [axis]))
        a = np.moveaxis(a, 0, axis)
    return a.reshape(-1)


def word_index(word: Sequence[int], b: int) -> int:
    """Index of a word in the dense table (first digit most significant)."""
    idx = 0
    for digit in word:
        idx = idx * b + int(digit)
    return idx


def subgroup_char_sum(c: CodeSpace, word: Sequence[int]) -> complex:
    """sum over A in C of exp(2 pi i A.word / b): #C on the dual, else 0."""
    words = c.words()
    dots = (words @ (np.asarray(word, dtype=np.int64) % c.b)) % c.b
    counts = np.bincount(dots, minlength=c.b)
    return sum(
        int(cnt) * _root(c.b, k) for k, cnt in enumerate(counts)
    )


def _v_membership(
    words: np.ndarray, gamma: Sequence[int], lam: Sequence[int], d: int, n: int,
    dual_side: bool,
) -> np.ndarray:
    """Mask of words in V_(gamma,lambda) (or its dual shape)."""
    m = words.reshape(len(words), d, n)
    ok = np.ones(len(words), dtype=bool)
    for i in range(d):
        g, lm = gamma[i], lam[i]
        block = m[:, i, :]
        if dual_side:
            # free positions: 1..lambda_i and gamma_i (when lambda_i < gamma_i)
            for k in range(1, n + 1):
                free = k <= lm or (k == g and lm < g) or (k <= g and lm == g)
                if not free:
                    ok &= block[:, k - 1] == 0
        else:
            # zero positions: 1..lambda_i and gamma_i; free elsewhere
            for k in range(1, n + 1):
                zero = k <= lm or (k == g and lm < g)
                if zero:
                    ok &= block[:, k - 1] == 0
    return ok


@dataclass(frozen=True)
class VCountReport:
    count_in_code: int
    count_in_dual: int
    identity_ok: bool
    bound_ok: bool | None
    sigma: int


def v_gamma_lambda(
    c: CodeSpace,
    gamma: Sequence[int],
    lam: Sequence[int],
    check_bound: bool = False,
    limit: int | None = None,
) -> VCountReport:
    """Counting identity #(C n V_(g,l)) = #C / b^(|l|+sigma) * #(Cperp n Vperp).

    With check_bound, additionally tests the counting proposition
    #(Cperp n Vperp_(g,l)) <= b^d for |gamma| >= n+1 and |lambda| + d <= n.
    """
    d, n, b = c.d, c.n, c.b
    gamma = [int(v) for v in gamma]
    lam = [int(v) for v in lam]
    if len(gamma) != d or len(lam) != d:
        raise InvalidRange("gamma and lambda must have d entries")
    for g, lm in zip(gamma, lam):
        if not 0 <= lm <= g <= n:
            raise InvalidRange("need 0 <= lambda_i <= gamma_i <= n")
    sigma = sum(1 for g, lm in zip(gamma, lam) if lm < g)
    cap = limit if limit is not None else enum_limit()

    words_c = c.words(cap)
    dual = dual_code(c)
    words_d = dual.words(cap)
    in_v = _v_membership(words_c, gamma, lam, d, n, dual_side=False)
    in_vp = _v_membership(words_d, gamma, lam, d, n, dual_side=True)
    count_c = int(in_v.sum())
    count_d = int(in_vp.sum())

    lhs = count_c * b ** (sum(lam) + sigma)
    rhs = len(words_c) * count_d
    identity_ok = lhs == rhs

    bound_ok = None
    if check_bound:
        if sum(gamma) < n + 1 or sum(lam) + d > n:
            raise InvalidRange(
                "bound check needs |gamma| >= n+1 and |lambda| + d <= n"
            )
        bound_ok = count_d <= b**d
    return VCountReport(count_c, count_d, identity_ok, bound_ok, sigma)


def proposition_count(
    dual_words: np.ndarray, gamma: Sequence[int], lam: Sequence[int], d: int, n: int
) -> int:
    """#{A in Cperp : v_n(a_i) <= gamma_i and a_ik = 0 for lambda_i < k < gamma_i}."""
    m = dual_words.reshape(len(dual_words), d, n)
    ok = np.ones(len(dual_words), dtype=bool)
    for i in range(d):
        g, lm = int(gamma[i]), int(lam[i])
        block = m[:, i, :]
        if g < n:
            ok &= ~block[:, g:].any(axis=1)  # v_n(a_i) <= gamma_i
        for k in range(lm + 1, g):
            ok &= block[:, k - 1] == 0
    return int(ok.sum())


def haar_walsh_inner(idx: HaarIndex, alpha: Sequence[int], b: int) -> complex:
    """<h_jml, wal_alpha> in closed form, tensored over coordinates.

    In one dimension and j >= 0 the product is nonzero exactly when
    rho(alpha) = j + 1 with leading digit l; its modulus is b^-j.
    """
    idx.validate(b)
    value = 1.0 + 0.0j
    for ji, mi, li, ai in zip(idx.j, idx.m, idx.l, alpha):
        ai = int(ai)
        if ji == -1:
            if ai != 0:
                return 0.0j
            continue
        if nrt_weight(ai, b) != ji + 1:
            return 0.0j
        if (ai // b**ji) % b != li:
            return 0.0j
        # phase pairs digit nu of alpha with digit j-nu of m (m_1 is its LSB)
        exponent = 0
        for nu in range(ji):
            a_digit = (ai // b**nu) % b
            m_digit = (mi // b ** (ji - 1 - nu)) % b
            exponent += a_digit * m_digit
        value *= float(b) ** (-ji) * _root(b, -exponent)
    return value
