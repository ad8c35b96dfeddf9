"""Tableaux with substitutions and their block pfaffians.

A tableau is a shape (a list of cell columns) whose cells are paired off by
directed arrows, together with a labeling of the arrows; a substitution
attaches a matrix to every label.  The block pfaffian bpf is the signed sum
over per-column permutations of entry products, divided by the product of
label-multiplicity factorials; that quotient always has integer coefficients
and the division is asserted exact.

Cells are addressed as (column, row), both 1-based, rows counted from the
top.  Arrows are stored tail first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Mapping, Sequence

from .field import Mat, Mod, PrimeField, RATIONALS
from .pfaffian import BlockLayout, block_linearization
from .poly import Polynomial, PolyMatrix

MAX_CELLS_SYMBOLIC = 12
MAX_CELLS_NUMERIC = 16

Cell = tuple


class TableauError(ValueError):
    pass


class IntegralityError(ArithmeticError):
    """The signed permutation sum failed to divide by the label factor.

    The quotient is a polynomial with integer coefficients by construction,
    so this always signals an implementation bug, never bad input.
    """


def distribution_lookup(t: Sequence[int], j: int):
    """Block index and offset of position j in the distribution given by t.

    For t = (1,3,0,2) the blocks are {1},{2,3,4},{},{5,6}; position 5 lies
    in block 4 at offset 1.
    """
    if j < 1 or j > sum(t):
        raise ValueError(f"position {j} outside 1..{sum(t)}")
    upto = 0
    for block, size in enumerate(t, start=1):
        if j <= upto + size:
            return block, j - upto
        upto += size
    raise AssertionError("unreachable")


def expand_weight(dims: Sequence[int], weight: Sequence[int]) -> tuple:
    """Column sizes of the shape induced by a weight: dims[v] repeated
    weight[v] times, in vertex order."""
    if len(dims) != len(weight):
        raise ValueError("weight length must match the dimension vector")
    out = []
    for d, w in zip(dims, weight):
        if w < 0:
            raise ValueError("negative weight")
        out.extend([d] * w)
    return tuple(out)


@dataclass(frozen=True)
class TabArrow:
    tail: Cell
    head: Cell


@dataclass(frozen=True)
class Tableau:
    """Shape columns plus a perfect pairing of cells by directed arrows and
    an arrow labeling onto 1..s with column-consistent fibers."""

    columns: tuple
    arrows: tuple
    labels: tuple

    def __post_init__(self):
        if any(c < 1 for c in self.columns):
            raise TableauError("column sizes must be positive")
        total = sum(self.columns)
        if total % 2:
            raise TableauError(f"total cell count {total} is odd")
        if len(self.arrows) != len(self.labels):
            raise TableauError("one label per arrow required")
        seen = set()
        for a in self.arrows:
            for c, r in (a.tail, a.head):
                if not (1 <= c <= len(self.columns)) or not (1 <= r <= self.columns[c - 1]):
                    raise TableauError(f"cell ({c},{r}) outside the shape")
                if (c, r) in seen:
                    raise TableauError(f"cell ({c},{r}) used by two arrow endpoints")
                seen.add((c, r))
        if len(seen) != total:
            raise TableauError("every cell must be an arrow endpoint")
        s = max(self.labels, default=0)
        if sorted(set(self.labels)) != list(range(1, s + 1)):
            raise TableauError("labels must cover 1..s")
        cols_of: dict = {}
        for a, lbl in zip(self.arrows, self.labels):
            key = (a.tail[0], a.head[0])
            if cols_of.setdefault(lbl, key) != key:
                raise TableauError(f"label {lbl} spans arrows with different columns")

    @property
    def label_count(self) -> int:
        return max(self.labels, default=0)

    def fiber_sizes(self) -> tuple:
        out = [0] * self.label_count
        for lbl in self.labels:
            out[lbl - 1] += 1
        return tuple(out)

    def fiber_columns(self, label: int):
        """(tail column, head column) shared by every arrow of the fiber."""
        for a, lbl in zip(self.arrows, self.labels):
            if lbl == label:
                return a.tail[0], a.head[0]
        raise TableauError(f"no arrow with label {label}")

    def matrix_shape(self, label: int):
        tc, hc = self.fiber_columns(label)
        return self.columns[tc - 1], self.columns[hc - 1]


def fiber_factorial(t: Tableau) -> int:
    """Product of the factorials of the label fiber sizes."""
    out = 1
    for size in t.fiber_sizes():
        out *= factorial(size)
    return out


def _check_substitution(t: Tableau, mats: Sequence) -> bool:
    """Validate matrix shapes; returns True when all matrices are numeric."""
    if len(mats) != t.label_count:
        raise TableauError(f"expected {t.label_count} matrices, got {len(mats)}")
    numeric = True
    for lbl, m in enumerate(mats, start=1):
        rows, cols = t.matrix_shape(lbl)
        if m.rows != rows or m.cols != cols:
            raise TableauError(f"matrix {lbl} is {m.rows}x{m.cols}, expected {rows}x{cols}")
        if not isinstance(m, Mat):
            numeric = False
    return numeric


def _perm_signs(n: int):
    out = []
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        out.append((perm, sign))
    return out


def bpf0(t: Tableau, mats: Sequence, max_cells: int | None = None):
    """Signed permutation sum over the columns: for each tuple of per-column
    permutations, the product over arrows of the matrix entry at the permuted
    (tail cell, head cell) pair, weighted by the product of signs.

    Returns a Polynomial for symbolic substitutions and a scalar when every
    matrix is numeric.
    """
    numeric = _check_substitution(t, mats)
    total = sum(t.columns)
    wall = max_cells if max_cells is not None else (MAX_CELLS_NUMERIC if numeric else MAX_CELLS_SYMBOLIC)
    if total > wall:
        raise TableauError(f"{total} cells exceeds the configured wall of {wall}")
    arrows = [
        (a.tail[0] - 1, a.tail[1] - 1, a.head[0] - 1, a.head[1] - 1, mats[lbl - 1])
        for a, lbl in zip(t.arrows, t.labels)
    ]
    col_perms = [_perm_signs(n) for n in t.columns]
    if numeric:
        sample = mats[0][0, 0]
        zero = sample - sample
        acc = zero
        for combo in product(*col_perms):
            sign = 1
            for _, s in combo:
                sign *= s
            term = None
            for tc, tr, hc, hr, m in arrows:
                e = m[combo[tc][0][tr], combo[hc][0][hr]]
                if not e:
                    term = None
                    break
                term = e if term is None else term * e
            if term is not None:
                acc = acc + term if sign > 0 else acc - term
        return acc
    acc = Polynomial.zero()
    for combo in product(*col_perms):
        sign = 1
        for _, s in combo:
            sign *= s
        term = None
        for tc, tr, hc, hr, m in arrows:
            e = m[combo[tc][0][tr], combo[hc][0][hr]]
            if not e.terms:
                term = None
                break
            term = e if term is None else term * e
        if term is not None:
            acc = acc + term if sign > 0 else acc - term
    return acc


def _divide_exact(value, c: int):
    if isinstance(value, Polynomial):
        out = {}
        for mono, coeff in value.terms.items():
            if isinstance(coeff, Fraction) and coeff.denominator == 1 and coeff.numerator % c:
                raise IntegralityError(f"coefficient {coeff} of {Polynomial({mono: coeff})} not divisible by {c}")
            out[mono] = coeff / c
        return Polynomial(out)
    if isinstance(value, Fraction) and value.denominator == 1 and value.numerator % c:
        raise IntegralityError(f"value {value} not divisible by {c}")
    return value / c


def bpf(t: Tableau, mats: Sequence, max_cells: int | None = None):
    """Block pfaffian of a tableau with substitution: bpf0 divided by the
    label factor, with the division asserted exact on integer input.

    Over a prime field the sum is computed after lifting the entries to the
    integers, divided there, and reduced back; this keeps the result correct
    even when the characteristic divides the label factor.
    """
    c = fiber_factorial(t)
    numeric = _check_substitution(t, mats)
    if numeric and isinstance(mats[0][0, 0], Mod):
        p = mats[0][0, 0].p
        field = PrimeField(p)
        lifted = [Mat([[field.lift(e) for e in row] for row in m.data]) for m in mats]
        over_z = bpf0(t, lifted, max_cells)
        return field.coerce(_divide_exact(over_z, c))
    return _divide_exact(bpf0(t, mats, max_cells), c)


def block_embedding_sign(t: Tableau, mats: Sequence, max_cells: int | None = None) -> int:
    """Check that bpf equals the block partial linearization of the zero-
    padded embeddings up to one global sign, and return that sign.

    Matrix p is embedded at the (tail column, head column) block of its
    fiber, and the linearization degrees are the fiber sizes.  If both sides
    vanish the sign is +1 by convention; if neither sign matches, something
    is broken and we raise.
    """
    value = bpf(t, mats, max_cells)
    if not isinstance(value, Polynomial):
        value = Polynomial.constant(value) if value else Polynomial.zero()
    s = t.label_count
    positions = tuple(t.fiber_columns(lbl) for lbl in range(1, s + 1))
    layout = BlockLayout(dims=t.columns, positions=positions)
    lin = block_linearization(layout, list(mats), t.fiber_sizes())
    if value == lin:
        return 1
    if value == -lin:
        return -1
    raise AssertionError("block pfaffian does not match its block linearization up to sign")


def determinant_tableau(n: int):
    """Tableau whose block pfaffian is the determinant of its single n x n
    substitution: two columns of size n, arrows crossing row by row, all in
    one fiber."""
    arrows = tuple(TabArrow((1, i), (2, i)) for i in range(1, n + 1))
    return Tableau(columns=(n, n), arrows=arrows, labels=(1,) * n)


def pfaffian_tableau(n: int):
    """Single-column tableau of even size n whose block pfaffian is the
    generalized pfaffian of its substitution."""
    if n % 2:
        raise TableauError("even size required; see bordered_pfaffian_tableau")
    arrows = tuple(TabArrow((1, 2 * i - 1), (1, 2 * i)) for i in range(1, n // 2 + 1))
    return Tableau(columns=(n,), arrows=arrows, labels=(1,) * (n // 2))


def bordered_pfaffian_tableau(n: int):
    """Odd-size analogue: columns (n, 1) with one arrow crossing into the
    extra cell.  With substitutions (X, u) its block pfaffian equals, up to
    sign, the pfaffian of X - X^t bordered by the column u."""
    if n % 2 == 0:
        raise TableauError("odd size required; see pfaffian_tableau")
    k = (n - 1) // 2
    arrows = [TabArrow((1, 2 * i - 1), (1, 2 * i)) for i in range(1, k + 1)]
    arrows.append(TabArrow((1, n), (2, 1)))
    labels = (1,) * k + ((2 if k else 1),)
    return Tableau(columns=(n, 1), arrows=tuple(arrows), labels=labels)


@dataclass(frozen=True)
class PathSubstitution:
    """Per-label quiver paths realizing the substitution matrices."""

    paths: tuple  # tuple of arrow-name tuples, one per label


def is_path_tableau(setting, t: Tableau, weight: Sequence[int], paths: Mapping[int, Sequence[str]]):
    """Check the path-compatibility conditions of a tableau against a mixed
    quiver setting and weight.

    Requirements: the shape is the weight expansion of the dimension vector;
    every label has a composable path whose head is the vertex of the tail
    column and whose tail is the involution image of the head column's
    vertex.  Returns (ok, diagnostics); a nonzero weight at a symplectic
    vertex is flagged because the semi-invariance checker excludes it.
    """
    diags = []
    expected = expand_weight(setting.dim, weight)
    if tuple(t.columns) != expected:
        diags.append(f"shape {t.columns} differs from weight expansion {expected}")
    for v in range(1, setting.vertices + 1):
        if setting.group_of(v) == "Sp" and weight[v - 1] > 0:
            diags.append(f"flag: nonzero weight at symplectic vertex {v}")
    quiver = setting.quiver
    by_name = {a.name: a for a in quiver.arrows}
    for lbl in range(1, t.label_count + 1):
        path = tuple(paths.get(lbl, ()))
        if not path:
            diags.append(f"label {lbl}: no path given")
            continue
        bad = [nm for nm in path if nm not in by_name]
        if bad:
            diags.append(f"label {lbl}: unknown arrows {bad}")
            continue
        arrows = [by_name[nm] for nm in path]
        for first, second in zip(arrows, arrows[1:]):
            if first.head != second.tail:
                diags.append(f"label {lbl}: {first.name} and {second.name} do not compose")
        tail_col, head_col = t.fiber_columns(lbl)
        try:
            w_tail = distribution_lookup(weight, tail_col)[0]
            w_head = distribution_lookup(weight, head_col)[0]
        except ValueError:
            diags.append(f"label {lbl}: column outside the weight distribution")
            continue
        path_head = arrows[-1].head
        path_tail = arrows[0].tail
        if w_tail != path_head:
            diags.append(
                f"label {lbl}: tail column vertex {w_tail} != path head {path_head}"
            )
        if w_head != setting.inv(path_tail):
            diags.append(
                f"label {lbl}: head column vertex {w_head} != involution of path tail {setting.inv(path_tail)}"
            )
    ok = not any(not d.startswith("flag:") for d in diags)
    return ok, diags


def tableau_to_json(t: Tableau, weight=None, paths=None) -> dict:
    doc = {
        "columns": list(t.columns),
        "arrows": [
            {"tail": list(a.tail), "head": list(a.head), "label": lbl}
            for a, lbl in zip(t.arrows, t.labels)
        ],
    }
    if weight is not None:
        doc["weight"] = list(weight)
    if paths is not None:
        doc["substitution"] = [
            {"label": lbl, "path": list(path)} for lbl, path in sorted(paths.items())
        ]
    return doc


def tableau_from_json(doc: Mapping):
    arrows = tuple(TabArrow(tuple(a["tail"]), tuple(a["head"])) for a in doc["arrows"])
    labels = tuple(a["label"] for a in doc["arrows"])
    t = Tableau(columns=tuple(doc["columns"]), arrows=arrows, labels=labels)
    weight = tuple(doc["weight"]) if "weight" in doc else None
    paths = None
    if "substitution" in doc:
        paths = {}
        for sub in doc["substitution"]:
            if "path" in sub:
                paths[sub["label"]] = tuple(sub["path"])
    return t, weight, paths
