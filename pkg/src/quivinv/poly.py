"""Sparse exact multivariate polynomials and matrices of them.

Variables come in two kinds: generic matrix entries ``x[arrow,i,j]`` (one per
entry of a generic matrix attached to a quiver arrow, 1-based indices) and
auxiliary linearization variables ``x[k]``.  A monomial is a sorted tuple of
(variable, exponent) pairs; a polynomial maps monomials to nonzero exact
coefficients.  The zero polynomial has an empty term map and equality is
structural equality of normalized term maps.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Mapping, NamedTuple

from .field import RATIONALS, Mat, Mod

ENTRY = 0
AUX = 1


class Var(NamedTuple):
    kind: int              # ENTRY or AUX
    arrow: str             # arrow id; "" for auxiliary variables
    i: int                 # row (1-based), or the auxiliary index
    j: int                 # column (1-based); 0 for auxiliary

    def __str__(self):
        if self.kind == ENTRY:
            return f"x[{self.arrow},{self.i},{self.j}]"
        return f"x[{self.i}]"


def entry_var(arrow: str, i: int, j: int) -> Var:
    return Var(ENTRY, arrow, i, j)


def aux_var(k: int) -> Var:
    return Var(AUX, "", k, 0)


# A monomial is a tuple of (Var, exponent) pairs, sorted by variable and with
# positive exponents.  The empty tuple is the constant monomial.
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    ia = ib = 0
    while ia < len(a) and ib < len(b):
        va, ea = a[ia]
        vb, eb = b[ib]
        if va == vb:
            out.append((va, ea + eb))
            ia += 1
            ib += 1
        elif va < vb:
            out.append(a[ia])
            ia += 1
        else:
            out.append(b[ib])
            ib += 1
    out.extend(a[ia:])
    out.extend(b[ib:])
    return tuple(out)


def _mono_deg(m: Monomial) -> int:
    return sum(e for _, e in m)


class MissingVariableError(KeyError):
    pass


class Polynomial:
    """Sparse polynomial with exact coefficients (Fraction or Mod)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = terms or {}

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls({})

    @classmethod
    def constant(cls, c) -> "Polynomial":
        if isinstance(c, int):
            c = Fraction(c)
        return cls({(): c}) if c else cls({})

    @classmethod
    def variable(cls, v: Var) -> "Polynomial":
        return cls({((v, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction, Mod)):
            return Polynomial.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s:
                out[m] = s
            elif m in out:
                del out[m]
        return Polynomial(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Mod)):
            if isinstance(other, int):
                other = Fraction(other)
            if not other:
                return Polynomial()
            return Polynomial({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                c = ca * cb
                s = out.get(m)
                s = c if s is None else s + c
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def key(self):
        """Hashable canonical form, useful for duplicate detection."""
        return tuple(sorted((m, str(c)) for m, c in self.terms.items()))

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def total_degree(self) -> int:
        return max((_mono_deg(m) for m in self.terms), default=0)

    def arrow_degrees(self) -> dict:
        """Per-arrow total degree: max over terms of the arrow's exponent sum."""
        out: dict = {}
        for m in self.terms:
            per: dict = {}
            for v, e in m:
                if v.kind == ENTRY:
                    per[v.arrow] = per.get(v.arrow, 0) + e
            for a, d in per.items():
                if d > out.get(a, 0):
                    out[a] = d
        return out

    def is_homogeneous_per_arrow(self) -> bool:
        """True when every term has the same per-arrow degree vector."""
        seen = None
        for m in self.terms:
            per: dict = {}
            for v, e in m:
                if v.kind == ENTRY:
                    per[v.arrow] = per.get(v.arrow, 0) + e
            vec = tuple(sorted(per.items()))
            if seen is None:
                seen = vec
            elif vec != seen:
                return False
        return True

    def evaluate(self, assignment: Mapping[Var, object], field=RATIONALS):
        """Exact evaluation; every variable of the polynomial must be assigned."""
        total = field.zero
        for m, c in self.terms.items():
            acc = field.coerce(c)
            for v, e in m:
                try:
                    val = assignment[v]
                except KeyError:
                    raise MissingVariableError(f"no value for {v}") from None
                acc = acc * field.coerce(val) ** e
            total = total + acc
        return total

    def map_coefficients(self, fn) -> "Polynomial":
        out = {}
        for m, c in self.terms.items():
            c2 = fn(c)
            if c2:
                out[m] = c2
        return Polynomial(out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (-_mono_deg(t[0]), t[0])):
            if isinstance(c, Fraction) and c < 0:
                sign, mag = "-", -c
            else:
                sign, mag = "+", c
            factors = [f"{v}" if e == 1 else f"{v}^{e}" for v, e in m]
            if not factors:
                parts.append(f"{sign}{mag}")
            elif mag == 1:
                parts.append(sign + "*".join(factors))
            else:
                parts.append(f"{sign}{mag}*" + "*".join(factors))
        return "".join(parts)

    def __repr__(self):
        return f"Polynomial({self})"


_TERM_RE = re.compile(r"[+-]?[^+-]+")
_FACTOR_RE = re.compile(r"^x\[([^\]]*)\](?:\^(\d+))?$")


def parse_polynomial(text: str) -> Polynomial:
    """Parse the canonical text form, e.g. ``+2*x[a,1,2]*x[b,2,1]-x[a,1,1]``."""
    text = text.strip().replace(" ", "")
    if not text or text == "0":
        return Polynomial.zero()
    out = Polynomial.zero()
    consumed = 0
    for mt in _TERM_RE.finditer(text):
        consumed += len(mt.group(0))
        part = mt.group(0)
        sign = Fraction(1)
        if part[0] in "+-":
            if part[0] == "-":
                sign = Fraction(-1)
            part = part[1:]
        coeff = sign
        mono: dict = {}
        for factor in part.split("*"):
            fm = _FACTOR_RE.match(factor)
            if fm:
                inner, exp = fm.group(1), int(fm.group(2) or 1)
                fields = inner.split(",")
                if len(fields) == 3:
                    v = entry_var(fields[0], int(fields[1]), int(fields[2]))
                elif len(fields) == 1:
                    v = aux_var(int(fields[0]))
                else:
                    raise ValueError(f"bad variable {factor!r}")
                mono[v] = mono.get(v, 0) + exp
            else:
                coeff *= Fraction(factor)
        key = tuple(sorted(mono.items()))
        out = out + Polynomial({key: coeff} if coeff else {})
    if consumed != len(text):
        raise ValueError(f"unparsed polynomial text {text!r}")
    return out


class PolyMatrix:
    """Immutable matrix of polynomials."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data):
        rows = tuple(tuple(row) for row in data)
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", rows)

    def __setattr__(self, *a):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def constant(cls, mat) -> "PolyMatrix":
        if isinstance(mat, Mat):
            mat = mat.data
        return cls([[Polynomial.constant(x) for x in row] for row in mat])

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls.constant(Mat.identity(n))

    @classmethod
    def symplectic(cls, n: int) -> "PolyMatrix":
        return cls.constant(Mat.symplectic(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        z = Polynomial.zero()
        return cls([[z] * cols for _ in range(rows)])

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and all(a == b for ra, rb in zip(self.data, other.data) for a, b in zip(ra, rb))
        )

    def __hash__(self):
        return hash(tuple(p.key() for row in self.data for p in row))

    def __add__(self, other):
        self._match(other)
        return PolyMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other):
        self._match(other)
        return PolyMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __neg__(self):
        return PolyMatrix([[-a for a in row] for row in self.data])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Mod, Polynomial)):
            return PolyMatrix([[a * other for a in row] for row in self.data])
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = list(zip(*other.data))
        out = []
        for row in self.data:
            out_row = []
            for col in cols:
                acc = Polynomial.zero()
                for a, b in zip(row, col):
                    if a.terms and b.terms:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return PolyMatrix(out)

    def __rmul__(self, scalar):
        return PolyMatrix([[scalar * a for a in row] for row in self.data])

    def _match(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(list(zip(*self.data)))

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(a) for a in row] for row in self.data])

    def evaluate(self, assignment, field=RATIONALS) -> Mat:
        return Mat([[p.evaluate(assignment, field) for p in row] for row in self.data])

    def variables(self) -> set:
        out = set()
        for row in self.data:
            for p in row:
                out |= p.variables()
        return out

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols})"


ARROW_KINDS = ("M", "S+", "S-", "L+", "L-")


def generic_matrix(arrow: str, rows: int, cols: int, kind: str = "M") -> PolyMatrix:
    """Generic matrix of indeterminates for an arrow, with symmetry constraints.

    ``S+``/``S-`` force the matrix (skew-)symmetric; ``L+``/``L-`` force X*J
    (skew-)symmetric with J the standard skew form.  Dependent entries are
    substituted so only free positions carry variables.
    """
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if kind not in ARROW_KINDS:
        raise ValueError(f"unknown arrow kind {kind!r}")
    v = lambda i, j: Polynomial.variable(entry_var(arrow, i, j))
    if kind == "M":
        return PolyMatrix([[v(i, j) for j in range(1, cols + 1)] for i in range(1, rows + 1)])
    if rows != cols:
        raise ValueError(f"kind {kind} needs a square matrix, got {rows}x{cols}")
    n = rows
    if kind == "S+":
        return PolyMatrix([[v(min(i, j), max(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)])
    if kind == "S-":
        z = Polynomial.zero()
        return PolyMatrix(
            [[z if i == j else (v(i, j) if i < j else -v(j, i)) for j in range(1, n + 1)] for i in range(1, n + 1)]
        )
    # L+/L-: in block form X = [[A, B], [C, D]] with J = [[0, E], [-E, 0]],
    # (XJ)^t = XJ forces B, C symmetric and D = -A^t; the skew case forces
    # B, C skew and D = A^t.
    if n % 2:
        raise ValueError(f"kind {kind} needs even size, got {n}")
    m = n // 2
    sym = kind == "L+"
    z = Polynomial.zero()
    grid = [[z] * n for _ in range(n)]
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            grid[i - 1][j - 1] = v(i, j)                      # A free
            grid[m + i - 1][m + j - 1] = (-v(j, i)) if sym else v(j, i)  # D dependent
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i < j:
                grid[i - 1][m + j - 1] = v(i, m + j)
                grid[j - 1][m + i - 1] = v(i, m + j) if sym else -v(i, m + j)
                grid[m + i - 1][j - 1] = v(m + i, j)
                grid[m + j - 1][i - 1] = v(m + i, j) if sym else -v(m + i, j)
            elif i == j:
                if sym:
                    grid[i - 1][m + i - 1] = v(i, m + i)
                    grid[m + i - 1][i - 1] = v(m + i, i)
    return PolyMatrix(grid)


def trace(m: PolyMatrix) -> Polynomial:
    if m.rows != m.cols:
        raise ValueError("trace of a non-square matrix")
    acc = Polynomial.zero()
    for i in range(m.rows):
        acc = acc + m.data[i][i]
    return acc


def det(m: PolyMatrix) -> Polynomial:
    """Symbolic determinant by cofactor expansion, memoized on column subsets."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    data = m.data
    cache: dict = {}

    def minor(row: int, mask: int) -> Polynomial:
        if row == n:
            return Polynomial.constant(1)
        got = cache.get(mask)
        if got is not None:
            return got
        acc = Polynomial.zero()
        sign = 1
        for j in range(n):
            bit = 1 << j
            if not (mask & bit):
                continue
            e = data[row][j]
            if e.terms:
                sub = minor(row + 1, mask & ~bit)
                term = e * sub
                acc = acc + term if sign > 0 else acc - term
            sign = -sign
        cache[mask] = acc
        return acc

    return minor(0, (1 << n) - 1)


def sigma(m: PolyMatrix, k: int) -> Polynomial:
    """k-th characteristic coefficient: the sum of all principal k x k minors.

    Division-free, so it is valid over any coefficient field.  sigma(m, 1)
    is the trace and sigma(m, n) the determinant.
    """
    if m.rows != m.cols:
        raise ValueError("sigma of a non-square matrix")
    n = m.rows
    if not 1 <= k <= n:
        raise ValueError(f"sigma index {k} out of range 1..{n}")
    acc = Polynomial.zero()
    for subset in combinations(range(n), k):
        sub = PolyMatrix([[m.data[i][j] for j in subset] for i in subset])
        acc = acc + det(sub)
    return acc


def substitute(f: Polynomial, tables: Mapping[str, PolyMatrix]) -> Polynomial:
    """Ring homomorphism sending x[a,i,j] to tables[a][i-1,j-1]; other
    variables (including auxiliaries) are left alone."""
    out = Polynomial.zero()
    for mono, coeff in f.terms.items():
        acc = Polynomial.constant(coeff)
        for v, e in mono:
            if v.kind == ENTRY and v.arrow in tables:
                repl = tables[v.arrow][v.i - 1, v.j - 1]
                acc = acc * repl ** e
                if not acc.terms:
                    break
            else:
                acc = acc * Polynomial({((v, e),): Fraction(1)})
        out = out + acc
    return out
