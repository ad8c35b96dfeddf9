"""Pfaffians, the generalized pfaffian, and (block) partial linearizations.

The pfaffian is computed by recursive expansion along the first remaining
row, which is division-free and therefore valid over every supported
coefficient field.  The normalized symmetric-group sum formula only makes
sense over the rationals and is kept as a test oracle, not used here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import Mat
from .poly import Polynomial, PolyMatrix, aux_var


def _as_polymatrix(m) -> PolyMatrix:
    return PolyMatrix.constant(m) if isinstance(m, Mat) else m


def pf(m: PolyMatrix | Mat) -> Polynomial:
    """Pfaffian of an exactly skew-symmetric matrix of even size."""
    m = _as_polymatrix(m)
    if m.rows != m.cols:
        raise ValueError("pfaffian of a non-square matrix")
    n = m.rows
    if n % 2:
        raise ValueError(f"pfaffian needs even size, got {n}")
    for i in range(n):
        for j in range(i, n):
            if m[i, j] != -m[j, i]:
                raise ValueError(f"matrix is not skew-symmetric at ({i + 1},{j + 1})")
    cache: dict = {(): Polynomial.constant(1)}

    def expand(indices: tuple) -> Polynomial:
        got = cache.get(indices)
        if got is not None:
            return got
        first, rest = indices[0], indices[1:]
        acc = Polynomial.zero()
        for pos, j in enumerate(rest):
            e = m[first, j]
            if e.terms:
                sub = expand(rest[:pos] + rest[pos + 1:])
                term = e * sub
                acc = acc + term if pos % 2 == 0 else acc - term
        cache[indices] = acc
        return acc

    return expand(tuple(range(n)))


def pf_scalar(m: Mat):
    """Pfaffian of a numeric skew matrix, returned as a scalar."""
    p = pf(m)
    if not p.terms:
        zero = m[0, 0] - m[0, 0]
        return zero
    return next(iter(p.terms.values()))


def gen_pf(x: PolyMatrix | Mat) -> Polynomial:
    """Generalized pfaffian of an arbitrary square matrix of even size:
    the pfaffian of x - x^t."""
    x = _as_polymatrix(x)
    if x.rows != x.cols:
        raise ValueError("generalized pfaffian of a non-square matrix")
    if x.rows % 2:
        raise ValueError(f"generalized pfaffian needs even size, got {x.rows}")
    return pf(x - x.transpose())


def partial_linearization(mats: Sequence[PolyMatrix | Mat], degrees: Sequence[int]) -> Polynomial:
    """Coefficient of x_1^{k_1}...x_s^{k_s} in the generalized pfaffian of
    x_1*X_1 + ... + x_s*X_s, extracted from an exact symbolic expansion in
    the auxiliary variables."""
    mats = [_as_polymatrix(m) for m in mats]
    if len(mats) != len(degrees) or not mats:
        raise ValueError("need one degree per matrix")
    n = mats[0].rows
    if any(m.rows != n or m.cols != n for m in mats):
        raise ValueError("all matrices must be square of equal size")
    if any(k < 1 for k in degrees):
        raise ValueError("degrees must be positive")
    if sum(degrees) != n // 2 or n % 2:
        raise ValueError(f"degrees must sum to {n}/2 with n even")
    combo = PolyMatrix.zeros(n, n)
    for idx, m in enumerate(mats):
        t = Polynomial.variable(aux_var(idx + 1))
        combo = combo + m * t
    full = gen_pf(combo)
    target = {idx + 1: k for idx, k in enumerate(degrees)}
    out: dict = {}
    for mono, coeff in full.terms.items():
        auxpart = {v.i: e for v, e in mono if v.kind == 1}
        if auxpart == target:
            rest = tuple((v, e) for v, e in mono if v.kind == 0)
            prev = out.get(rest)
            out[rest] = coeff if prev is None else prev + coeff
    return Polynomial({m: c for m, c in out.items() if c})


@dataclass(frozen=True)
class BlockLayout:
    """Block structure for embedded matrices: block i has size dims[i], and
    matrix p occupies only the block at positions[p] (1-based pair)."""

    dims: tuple
    positions: tuple

    def __post_init__(self):
        for p, q in self.positions:
            if not (1 <= p <= len(self.dims) and 1 <= q <= len(self.dims)):
                raise ValueError(f"block position ({p},{q}) out of range")

    @property
    def total(self) -> int:
        return sum(self.dims)

    def offsets(self):
        off = [0]
        for d in self.dims:
            off.append(off[-1] + d)
        return off

    def embed(self, index: int, block: PolyMatrix | Mat) -> PolyMatrix:
        """Zero-padded total x total matrix holding the given block at the
        position assigned to matrix `index`."""
        block = _as_polymatrix(block)
        p, q = self.positions[index]
        if block.rows != self.dims[p - 1] or block.cols != self.dims[q - 1]:
            raise ValueError(
                f"block {index} is {block.rows}x{block.cols}, "
                f"expected {self.dims[p - 1]}x{self.dims[q - 1]}"
            )
        off = self.offsets()
        n = self.total
        z = Polynomial.zero()
        grid = [[z] * n for _ in range(n)]
        for i in range(block.rows):
            for j in range(block.cols):
                grid[off[p - 1] + i][off[q - 1] + j] = block[i, j]
        return PolyMatrix(grid)


def block_linearization(layout: BlockLayout, blocks: Sequence[PolyMatrix | Mat], degrees: Sequence[int]) -> Polynomial:
    """Block partial linearization: embed every block into its zero-padded
    position and take the partial linearization of the embeddings."""
    if len(blocks) != len(layout.positions):
        raise ValueError("one block per layout position required")
    embedded = [layout.embed(i, b) for i, b in enumerate(blocks)]
    return partial_linearization(embedded, degrees)
