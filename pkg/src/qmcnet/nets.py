"""Digital nets from generating matrices.

Points are stored exactly: coordinate i of a point is numerator_i / b**n.
All net checks (box counting, dual sets, character sums) run on integer
numerators, never on floats.
"""
from __future__ import annotations

import cmath
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    InvalidParams,
    NetFileError,
    NotPowerCardinality,
    SizeOverflow,
)
from .field import PrimeField, digits_lsb, enum_limit, enumerate_span, gf_nullspace, gf_rank


@dataclass(frozen=True, eq=False)
class GeneratingMatrices:
    """d generating matrices, each n x n over F_b."""

    b: int
    n: int
    d: int
    mats: np.ndarray  # shape (d, n, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratingMatrices):
            return NotImplemented
        return (
            (self.b, self.n, self.d) == (other.b, other.n, other.d)
            and np.array_equal(self.mats, other.mats)
        )

    def __post_init__(self):
        PrimeField(self.b)  # validates primality
        m = np.asarray(self.mats, dtype=np.int64)
        if m.shape != (self.d, self.n, self.n):
            raise InvalidParams(
                f"expected {self.d} matrices of shape {self.n}x{self.n}, got {m.shape}"
            )
        if m.size and (m.min() < 0 or m.max() >= self.b):
            raise InvalidParams("matrix entries must lie in [0, b)")
        object.__setattr__(self, "mats", m)

    def to_json(self) -> str:
        return json.dumps(
            {"b": self.b, "n": self.n, "d": self.d, "matrices": self.mats.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "GeneratingMatrices":
        obj = json.loads(text)
        return cls(obj["b"], obj["n"], obj["d"], np.asarray(obj["matrices"]))


@dataclass(frozen=True, eq=False)
class PointSet:
    """An ordered point set with exact coordinates k_i / b**n."""

    b: int
    n: int
    d: int
    numerators: np.ndarray  # shape (N, d), integers in [0, b**n)
    provenance: Optional[dict] = field(default=None, compare=False)

    def __eq__(self, other) -> bool:
        # provenance is descriptive metadata, not part of identity
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            (self.b, self.n, self.d) == (other.b, other.n, other.d)
            and np.array_equal(self.numerators, other.numerators)
        )

    def __post_init__(self):
        nums = np.asarray(self.numerators, dtype=np.int64)
        if nums.ndim != 2 or nums.shape[1] != self.d:
            raise InvalidParams("numerators must have shape (N, d)")
        denom = self.b**self.n
        if nums.size and (nums.min() < 0 or nums.max() >= denom):
            raise InvalidParams("numerators out of [0, b**n)")
        object.__setattr__(self, "numerators", nums)

    @property
    def size(self) -> int:
        return self.numerators.shape[0]

    @property
    def denominator(self) -> int:
        return self.b**self.n

    def coordinates(self) -> np.ndarray:
        """Floating-point view of the points, (N, d)."""
        return self.numerators / float(self.denominator)

    def fractions(self) -> list[tuple[Fraction, ...]]:
        denom = self.denominator
        return [
            tuple(Fraction(int(k), denom) for k in row) for row in self.numerators
        ]

    def digit_rows(self, index: int) -> np.ndarray:
        """Digits h_(r,i,1..n) of point `index`, most significant first, (d, n)."""
        denom_digits = digits_lsb(self.numerators[index], self.n, self.b)
        return denom_digits[:, ::-1]


def phi_map(digits: Sequence[int], b: int) -> int:
    """Numerator of Phi_n(a) = a_1/b + ... + a_n/b**n, i.e. sum a_v b**(n-v)."""
    k = 0
    for a in digits:
        if not 0 <= a < b:
            raise InvalidParams("digit out of [0, b)")
        k = k * b + int(a)
    return k


def generate_points(
    g: GeneratingMatrices, limit: int | None = None
) -> PointSet:
    """The digital method: point r has digit vectors C_i @ rbar, r = 0..b**n-1.

    rbar holds the base-b digits of r least significant first; row nu of the
    product is the digit multiplying b**-(nu+1).
    """
    b, n, d = g.b, g.n, g.d
    total = b**n
    cap = limit if limit is not None else enum_limit()
    if total > cap:
        raise SizeOverflow(f"b**n = {total} points exceed limit {cap}")
    if n == 0:
        return PointSet(b, 0, d, np.zeros((1, d), dtype=np.int64))
    rbar = digits_lsb(np.arange(total), n, b).T  # (n, N)
    weights = np.array([b ** (n - 1 - nu) for nu in range(n)], dtype=np.int64)
    nums = np.empty((total, d), dtype=np.int64)
    for i in range(d):
        h = (g.mats[i] @ rbar) % b  # (n, N)
        nums[:, i] = weights @ h
    return PointSet(b, n, d, nums)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class NetCheck:
    ok: bool
    witness_shape: Optional[tuple[int, ...]] = None
    witness_box: Optional[tuple[int, ...]] = None
    witness_count: Optional[int] = None


def is_net(p: PointSet) -> NetCheck:
    """Exact (0,n,d)-net test: every b-adic box of volume b**-n holds one point.

    Checks all shapes (j_1..j_d) with sum j_i = n by digit-prefix bucketing
    on the numerators; coarser boxes follow by aggregation.
    """
    b, n, d = p.b, p.n, p.d
    if p.size != b**n:
        raise NotPowerCardinality(f"N = {p.size} != b**n = {b**n}")
    for shape in compositions(n, d):
        # box index of each point under this shape, mixed-radix packed
        key = np.zeros(p.size, dtype=np.int64)
        for i, j in enumerate(shape):
            key = key * (b**j) + p.numerators[:, i] // (b ** (n - j))
        counts = np.bincount(key, minlength=b**n)
        bad = np.nonzero(counts != 1)[0]
        if bad.size:
            box_key = int(bad[0])
            box = []
            for j in reversed(shape):
                box.append(box_key % (b**j))
                box_key //= b**j
            return NetCheck(
                ok=False,
                witness_shape=shape,
                witness_box=tuple(reversed(box)),
                witness_count=int(counts[bad[0]]),
            )
    return NetCheck(ok=True)


@dataclass(frozen=True)
class DualSet:
    """Nonzero frequency tuples annihilated by the transposed matrices."""

    b: int
    n: int
    d: int
    elements: tuple[tuple[int, ...], ...]

    def __contains__(self, t) -> bool:
        return tuple(int(v) for v in t) in set(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def dual_set(g: GeneratingMatrices, limit: int | None = None) -> DualSet:
    """Solve C_1^T tbar_1 + ... + C_d^T tbar_d = 0 over F_b, excluding t = 0.

    tbar_i holds the digits of t_i least significant first, matching rbar.
    """
    b, n, d = g.b, g.n, g.d
    if n == 0:
        return DualSet(b, 0, d, ())
    stacked = np.concatenate(
        [g.mats[i].T for i in range(d)], axis=1
    )  # (n, d*n)
    basis = gf_nullspace(stacked, b)
    cap = limit if limit is not None else enum_limit()
    if b ** len(basis) > cap:
        raise SizeOverflow(
            f"null space has b**{len(basis)} elements, exceeding limit {cap}"
        )
    words = enumerate_span(basis, b, cap) if len(basis) else np.zeros((1, d * n), np.int64)
    powers = np.array([b**k for k in range(n)], dtype=np.int64)
    elems = []
    for w in words:
        t = tuple(int(w[i * n : (i + 1) * n] @ powers) for i in range(d))
        if any(t):
            elems.append(t)
    return DualSet(b, n, d, tuple(sorted(elems)))


def stacked_nullity(g: GeneratingMatrices) -> int:
    stacked = np.concatenate([g.mats[i].T for i in range(g.d)], axis=1)
    return g.d * g.n - gf_rank(stacked, g.b)


def char_sum(p: PointSet, t: Sequence[int]) -> complex:
    """sum_h wal_t(x_h) as an exact sum of b-th roots of unity.

    For a digital net this is b**n on the dual set (plus t = 0) and 0
    elsewhere; the function itself evaluates any point set.
    """
    b, n = p.b, p.n
    t = [int(v) for v in t]
    if len(t) != p.d:
        raise InvalidParams("t must have d coordinates")
    exponents = np.zeros(p.size, dtype=np.int64)
    for i, ti in enumerate(t):
        # digit nu of x (most significant first) pairs with digit nu of t
        nu = 0
        while ti:
            tau = ti % b
            if tau:
                xdig = (p.numerators[:, i] // (b ** (n - 1 - nu))) % b
                exponents += tau * xdig
            ti //= b
            nu += 1
            if nu >= n and ti:
                raise InvalidParams("t coordinate has more digits than n")
    counts = np.bincount(exponents % b, minlength=b)
    roots = [cmath.exp(2j * cmath.pi * k / b) for k in range(b)]
    return sum(int(c) * r for c, r in zip(counts, roots))


# --- point-set file format ---------------------------------------------------

_HEADER_RE = re.compile(r"^#qmcnet v1 b=(\d+) n=(\d+) d=(\d+) N=(\d+)\s*$")


def _write_pointset(p: PointSet, fh) -> None:
    fh.write(f"#qmcnet v1 b={p.b} n={p.n} d={p.d} N={p.size}\n")
    if p.provenance:
        fh.write(f"#provenance {json.dumps(p.provenance, sort_keys=True)}\n")
    for row in p.numerators:
        fh.write(" ".join(str(int(k)) for k in row) + "\n")


def save_pointset(p: PointSet, path) -> None:
    """Write the exact text format; provenance goes into a comment line."""
    if hasattr(path, "write"):
        _write_pointset(p, path)
        return
    with open(path, "w") as fh:
        _write_pointset(p, fh)


def load_pointset(path: str) -> PointSet:
    with open(path) as fh:
        header = fh.readline()
        m = _HEADER_RE.match(header)
        if not m:
            raise NetFileError(f"bad header: {header!r}")
        b, n, d, count = (int(g) for g in m.groups())
        provenance = None
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#provenance"):
                provenance = json.loads(line[len("#provenance") :])
                continue
            if line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != d:
                raise NetFileError(f"expected {d} numerators per line: {line!r}")
            rows.append([int(v) for v in parts])
    if len(rows) != count:
        raise NetFileError(f"header says N={count}, file has {len(rows)} points")
    nums = np.asarray(rows, dtype=np.int64).reshape(count, d)
    denom = b**n
    if nums.size and (nums.min() < 0 or nums.max() >= denom):
        raise NetFileError("numerator out of range [0, b**n)")
    return PointSet(b, n, d, nums, provenance=provenance)
