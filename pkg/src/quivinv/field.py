"""Exact scalars and dense exact matrices.

All arithmetic in this package is exact: rationals are ``fractions.Fraction``
and prime fields are residues modulo an odd prime ``p >= 5``.  There is no
floating point anywhere.  Prime fields serve as a cheap evaluation domain for
randomized identity testing; the symbolic layer keeps rational (in practice
integer) coefficients throughout.
"""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    pass


class Mod:
    """Residue modulo an odd prime, normalized to [0, p)."""

    __slots__ = ("val", "p")

    def __init__(self, val: int, p: int):
        self.val = val % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldError(f"mixed moduli {self.p} and {other.p}")
            return other.val
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return (other.numerator * _modinv(other.denominator, self.p)) % self.p
        return NotImplemented

    def __add__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(self.val + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(self.val - v, self.p)

    def __rsub__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(v - self.val, self.p)

    def __mul__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(self.val * v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(self.val * _modinv(v, self.p), self.p)

    def __rtruediv__(self, other):
        v = self._lift(other)
        if v is NotImplemented:
            return NotImplemented
        return Mod(v * _modinv(self.val, self.p), self.p)

    def __pow__(self, e: int):
        if e < 0:
            return Mod(pow(_modinv(self.val, self.p), -e, self.p), self.p)
        return Mod(pow(self.val, e, self.p), self.p)

    def __neg__(self):
        return Mod(-self.val, self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.val == other.val
        if isinstance(other, (int, Fraction)):
            v = self._lift(other)
            return self.val == v
        return NotImplemented

    def __hash__(self):
        return hash((self.val, self.p))

    def __bool__(self):
        return self.val != 0

    def __repr__(self):
        return str(self.val)


def _modinv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"inverse of 0 mod {p}")
    return pow(a, p - 2, p)


class Rationals:
    """The field of rationals, backed by Fraction."""

    characteristic = 0
    name = "rational"

    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise FieldError(f"cannot coerce {x!r} into the rationals")

    def rand(self, rng):
        return Fraction(rng.randint(-9, 9))

    def lift(self, x) -> Fraction:
        return self.coerce(x)

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p) for a prime p >= 5.

    Characteristics 2 and 3 are excluded: 2 breaks the orthogonal theory and
    3 makes the Cayley-transform samplers degenerate too often.
    """

    def __init__(self, p: int):
        if p < 5 or not _is_prime(p):
            raise FieldError(f"prime field modulus must be a prime >= 5, got {p}")
        self.p = p
        self.characteristic = p
        self.name = f"GF({p})"
        self.zero = Mod(0, p)
        self.one = Mod(1, p)

    def coerce(self, x):
        if isinstance(x, Mod):
            if x.p != self.p:
                raise FieldError(f"residue mod {x.p} in GF({self.p})")
            return x
        if isinstance(x, int):
            return Mod(x, self.p)
        if isinstance(x, Fraction):
            return Mod(x.numerator * _modinv(x.denominator, self.p), self.p)
        raise FieldError(f"cannot coerce {x!r} into GF({self.p})")

    def rand(self, rng):
        return Mod(rng.randrange(self.p), self.p)

    def lift(self, x) -> Fraction:
        """Lift a residue to its integer representative in [0, p)."""
        return Fraction(self.coerce(x).val)

    def __repr__(self):
        return self.name


RATIONALS = Rationals()


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def field_from_spec(spec) -> Rationals | PrimeField:
    """Parse a field spec: 'rational' (or 'q'/'Q') or a prime given as int/str."""
    if isinstance(spec, (Rationals, PrimeField)):
        return spec
    if isinstance(spec, str):
        if spec.lower() in ("rational", "q", "qq"):
            return RATIONALS
        spec = int(spec)
    return PrimeField(spec)


class SingularMatrixError(ZeroDivisionError):
    pass


class Mat:
    """Immutable dense matrix over an exact scalar type (Fraction or Mod)."""

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
        raise AttributeError("Mat is immutable")

    @classmethod
    def identity(cls, n: int, field=RATIONALS) -> "Mat":
        z, o = field.zero, field.one
        return cls([[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def symplectic(cls, n: int, field=RATIONALS) -> "Mat":
        """The standard skew form J(n) = [[0, E], [-E, 0]] for even n."""
        if n % 2:
            raise ValueError(f"J({n}) needs even size")
        m = n // 2
        z, o = field.zero, field.one
        rows = [[z] * n for _ in range(n)]
        for i in range(m):
            rows[i][m + i] = o
            rows[m + i][i] = -o
        return cls(rows)

    @classmethod
    def zeros(cls, rows: int, cols: int, field=RATIONALS) -> "Mat":
        z = field.zero
        return cls([[z] * cols for _ in range(rows)])

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __eq__(self, other):
        return isinstance(other, Mat) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __add__(self, other):
        self._match(other)
        return Mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other):
        self._match(other)
        return Mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)])

    def __neg__(self):
        return Mat([[-a for a in row] for row in self.data])

    def __mul__(self, other):
        if not isinstance(other, Mat):
            return Mat([[a * other for a in row] for row in self.data])
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = list(zip(*other.data))
        return Mat([[_dot(row, col) for col in cols] for row in self.data])

    def __rmul__(self, scalar):
        return Mat([[scalar * a for a in row] for row in self.data])

    def _match(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def transpose(self) -> "Mat":
        return Mat(list(zip(*self.data)))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i][j] == self.data[j][i] for i in range(self.rows) for j in range(i + 1, self.cols)
        )

    def is_skew(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i][j] == -self.data[j][i] for i in range(self.rows) for j in range(i, self.cols)
        )

    def det(self):
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(row) for row in self.data]
        sign = 1
        prev = None
        for k in range(n - 1):
            if not a[k][k]:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    zero = a[k][k] - a[k][k]
                    return zero
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                    a[i][j] = num if prev is None else num / prev
            prev = a[k][k]
        d = a[n - 1][n - 1]
        return -d if sign < 0 else d

    def inv(self) -> "Mat":
        """Exact inverse by Gauss-Jordan elimination."""
        if self.rows != self.cols:
            raise ValueError("inverse of a non-square matrix")
        n = self.rows
        a = [list(row) for row in self.data]
        sample = self.data[0][0]
        if isinstance(sample, Mod):
            z, o = Mod(0, sample.p), Mod(1, sample.p)
        else:
            z, o = Fraction(0), Fraction(1)
        b = [[o if i == j else z for j in range(n)] for i in range(n)]
        for k in range(n):
            pivot_row = next((i for i in range(k, n) if a[i][k]), None)
            if pivot_row is None:
                raise SingularMatrixError("matrix is singular")
            a[k], a[pivot_row] = a[pivot_row], a[k]
            b[k], b[pivot_row] = b[pivot_row], b[k]
            pivot = a[k][k]
            a[k] = [x / pivot for x in a[k]]
            b[k] = [x / pivot for x in b[k]]
            for i in range(n):
                if i != k and a[i][k]:
                    f = a[i][k]
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
                    b[i] = [x - f * y for x, y in zip(b[i], b[k])]
        return Mat(b)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self.data)
        return f"Mat[{body}]"


def _dot(row, col):
    it = iter(zip(row, col))
    a, b = next(it)
    acc = a * b
    for a, b in it:
        acc = acc + a * b
    return acc
