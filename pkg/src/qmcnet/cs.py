"""The Chen-Skriganov construction over F_b.

Codewords are hyper-derivative evaluation vectors of polynomials of degree
below n = 2dw at 2d*d distinct field elements; the resulting linear code of
dimension n maps to a digital net in [0,1)^d.  Weight functionals and the
dual-code verification gate live here as well.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BaseTooSmall, DegreeTooLarge, InvalidParams, SizeOverflow
from .field import (
    PrimeField,
    Polynomial,
    enum_limit,
    enumerate_span,
    gf_nullspace,
    gf_rank,
)
from .nets import GeneratingMatrices, PointSet, generate_points


def default_betas(b: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Canonical beta matrix: row-major consecutive field values.

    beta[i][nu] = i*2d + nu (0-based), pairwise distinct by construction.
    """
    if b < 2 * d * d:
        raise BaseTooSmall(f"need b >= 2d^2 = {2 * d * d}, got b = {b}")
    return tuple(
        tuple(i * 2 * d + nu for nu in range(2 * d)) for i in range(d)
    )


@dataclass(frozen=True)
class CSParams:
    """Parameters of one Chen-Skriganov instance; n = 2dw."""

    b: int
    d: int
    w: int
    betas: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        PrimeField(self.b)
        if self.d < 1 or self.w < 1:
            raise InvalidParams("need d >= 1 and w >= 1")
        if self.b < 2 * self.d * self.d:
            raise BaseTooSmall(
                f"need b >= 2d^2 = {2 * self.d * self.d}, got b = {self.b}"
            )
        betas = self.betas or default_betas(self.b, self.d)
        betas = tuple(tuple(int(v) % self.b for v in row) for row in betas)
        if len(betas) != self.d or any(len(row) != 2 * self.d for row in betas):
            raise InvalidParams("betas must be a d x 2d matrix")
        flat = [v for row in betas for v in row]
        if len(set(flat)) != len(flat):
            raise InvalidParams("beta values must be pairwise distinct")
        object.__setattr__(self, "betas", betas)

    @property
    def n(self) -> int:
        return 2 * self.d * self.w

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.b)

    def to_json(self) -> str:
        return json.dumps(
            {"b": self.b, "d": self.d, "w": self.w, "betas": [list(r) for r in self.betas]}
        )

    @classmethod
    def from_json(cls, text: str) -> "CSParams":
        obj = json.loads(text)
        betas = tuple(tuple(row) for row in obj.get("betas") or ())
        return cls(obj["b"], obj["d"], obj["w"], betas)


def encode_poly(f: Polynomial, params: CSParams) -> np.ndarray:
    """Codeword A(f) as a flat length-d*n digit vector.

    Block i, entry (nu-1)*w + lam (1-based), holds the (lam-1)-th
    hyper-derivative of f at beta[i][nu]; lam runs fastest within each nu.
    """
    n, w, d, b = params.n, params.w, params.d, params.b
    if f.field.b != b:
        raise InvalidParams("polynomial base differs from CS base")
    if f.degree >= n:
        raise DegreeTooLarge(f"deg(f) = {f.degree} must be < n = {n}")
    derivs = [f.hasse_derivative(lam) for lam in range(w)]
    word = np.zeros(d * n, dtype=np.int64)
    for i in range(d):
        for nu in range(2 * d):
            beta = params.betas[i][nu]
            for lam in range(w):
                word[i * n + nu * w + lam] = derivs[lam](beta)
    return word


@dataclass(frozen=True)
class CodeSpace:
    """Row-space basis of a linear subspace of F_b^(d*n)."""

    b: int
    d: int
    n: int
    basis: np.ndarray  # shape (dim, d*n)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.int64) % self.b
        if basis.ndim != 2 or basis.shape[1] != self.d * self.n:
            raise InvalidParams("basis must have d*n columns")
        if len(basis) and gf_rank(basis, self.b) != len(basis):
            raise InvalidParams("basis rows must be linearly independent")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def words(self, limit: int | None = None) -> np.ndarray:
        """All b**dim codewords, shape (b**dim, d*n)."""
        if self.dim == 0:
            return np.zeros((1, self.d * self.n), dtype=np.int64)
        return enumerate_span(self.basis, self.b, limit)


def cs_code_space(params: CSParams) -> CodeSpace:
    """C_n: the span of the encodings of 1, z, ..., z^(n-1); dimension n."""
    field = params.field
    rows = []
    for k in range(params.n):
        coeffs = [0] * params.n
        coeffs[k] = 1
        rows.append(encode_poly(Polynomial(tuple(coeffs), field), params))
    return CodeSpace(params.b, params.d, params.n, np.asarray(rows))


def cs_generating_matrices(params: CSParams) -> GeneratingMatrices:
    """Generating matrices whose digital method reproduces Phi_n^d(C_n).

    Column k of C_i is block i of the encoding of z**k, so the digit vector
    rbar acts as the coefficient vector of f.
    """
    n, d = params.n, params.d
    code = cs_code_space(params)
    mats = np.zeros((d, n, n), dtype=np.int64)
    for k in range(n):
        word = code.basis[k]
        for i in range(d):
            mats[i][:, k] = word[i * n : (i + 1) * n]
    return GeneratingMatrices(params.b, n, d, mats)


def cs_point_set(params: CSParams, limit: int | None = None) -> PointSet:
    """CS_n = Phi_n^d(C_n) with b**n points, generated via the matrices."""
    g = cs_generating_matrices(params)
    p = generate_points(g, limit=limit)
    prov = {"kind": "cs", "params": json.loads(params.to_json())}
    return PointSet(p.b, p.n, p.d, p.numerators, provenance=prov)


def dual_code(c: CodeSpace) -> CodeSpace:
    """Basis of {A : B . A = 0 for all B in C}; dimension d*n - dim(C)."""
    if c.dim == 0:
        return CodeSpace(c.b, c.d, c.n, np.eye(c.d * c.n, dtype=np.int64))
    return CodeSpace(c.b, c.d, c.n, gf_nullspace(c.basis, c.b))


# --- weight functionals -------------------------------------------------------

def nrt_weight(alpha: int, b: int) -> int:
    """rho(alpha): base-b digit length; rho(0) = 0."""
    if alpha < 0:
        raise InvalidParams("alpha must be nonnegative")
    h = 0
    while alpha:
        h += 1
        alpha //= b
    return h


def hamming_weight(alpha: int, b: int) -> int:
    """kappa(alpha): number of nonzero base-b digits."""
    if alpha < 0:
        raise InvalidParams("alpha must be nonnegative")
    k = 0
    while alpha:
        if alpha % b:
            k += 1
        alpha //= b
    return k


def nrt_weight_d(alpha: Sequence[int], b: int) -> int:
    return sum(nrt_weight(a, b) for a in alpha)


def hamming_weight_d(alpha: Sequence[int], b: int) -> int:
    return sum(hamming_weight(a, b) for a in alpha)


def v_weight(a: Sequence[int]) -> int:
    """v_n(a) = max{nu : a_nu != 0} with positions 1-based; 0 for a = 0."""
    arr = np.asarray(a)
    nz = np.nonzero(arr)[0]
    return int(nz[-1]) + 1 if nz.size else 0


def kappa_weight(a: Sequence[int]) -> int:
    return int(np.count_nonzero(np.asarray(a)))


def v_weight_d(word: Sequence[int], d: int, n: int) -> int:
    arr = np.asarray(word).reshape(d, n)
    return sum(v_weight(arr[i]) for i in range(d))


def kappa_weight_d(word: Sequence[int]) -> int:
    return int(np.count_nonzero(np.asarray(word)))


def _blockwise_v(words: np.ndarray, d: int, n: int) -> np.ndarray:
    """v_n^d over an (M, d*n) array of words."""
    m = words.shape[0]
    blocks = words.reshape(m, d, n)
    nonzero = blocks != 0
    pos = np.arange(1, n + 1, dtype=np.int64)
    return (nonzero * pos).max(axis=2).sum(axis=1)


@dataclass(frozen=True)
class DualPropertyReport:
    kappa_min: int
    delta_min: int
    passed: bool
    words_checked: int


def verify_dual_properties(
    c_dual: CodeSpace, d: int, n: int, limit: int | None = None
) -> DualPropertyReport:
    """Exact minima of kappa_n^d and v_n^d over the dual, by full enumeration.

    Pass requires kappa_min >= 2d+1 and delta_min >= n+1; the zero code has
    delta = d*n + 1 by convention and passes vacuously.
    """
    if c_dual.dim == 0:
        return DualPropertyReport(
            kappa_min=d * n + 1, delta_min=d * n + 1, passed=True, words_checked=1
        )
    words = c_dual.words(limit)
    nonzero = words[np.any(words != 0, axis=1)]
    kappa_min = int(np.count_nonzero(nonzero, axis=1).min())
    delta_min = int(_blockwise_v(nonzero, d, n).min())
    passed = kappa_min >= 2 * d + 1 and delta_min >= n + 1
    return DualPropertyReport(kappa_min, delta_min, passed, words.shape[0])
