"""Exact rational linear algebra and polynomial primitives.

Everything in this module is computed over the rationals with no floating
point anywhere.  These are the primitives the spectral and orbit layers
reduce to: characteristic polynomials, kernels, invariance tests, Sturm
root counting, and the reciprocal (self-inverse factor) split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class NonSquareError(ValueError):
    pass


class DimensionMismatchError(ValueError):
    pass


class NotInvertibleError(ValueError):
    pass


class ZeroPolynomialError(ValueError):
    pass


class ZeroConstantTermError(ValueError):
    pass


class ParseError(ValueError):
    pass


RationalLike = Fraction | int | str


def to_fraction(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions, and "p/q" strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    if isinstance(x, float):
        raise ParseError(f"refusing float {x!r}; pass an exact rational")
    raise ParseError(f"not a rational: {x!r}")


def format_fraction(x: Fraction) -> str:
    """Serialize as "p/q", or "p" when the denominator is 1."""
    return str(x)


# === matrices ===


@dataclass(frozen=True)
class QMatrix:
    """Immutable rational matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0 or len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError("entry count does not match shape")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[RationalLike]]) -> "QMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ents: list[Fraction] = []
        for r in rows:
            if len(r) != nc:
                raise DimensionMismatchError("ragged rows")
            ents.extend(to_fraction(x) for x in r)
        return QMatrix(nr, nc, tuple(ents))

    @staticmethod
    def identity(n: int) -> "QMatrix":
        return QMatrix(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "QMatrix":
        return QMatrix(rows, cols, (Fraction(0),) * (rows * cols))

    @staticmethod
    def from_columns(cols: Sequence[Sequence[Fraction]]) -> "QMatrix":
        nc = len(cols)
        nr = len(cols[0]) if nc else 0
        return QMatrix(nr, nc, tuple(cols[j][i] for i in range(nr) for j in range(nc)))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch in +")
        return QMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch in -")
        return QMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "QMatrix":
        return QMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c: RationalLike) -> "QMatrix":
        c = to_fraction(c)
        return QMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError("shape mismatch in @")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [Fraction(0)] * (n * m)
        for i in range(n):
            arow = a[i * k : (i + 1) * k]
            base = i * m
            for t in range(k):
                c = arow[t]
                if c:
                    brow = b[t * m : (t + 1) * m]
                    for j in range(m):
                        if brow[j]:
                            out[base + j] += c * brow[j]
        return QMatrix(n, m, tuple(out))

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise DimensionMismatchError("vector length mismatch")
        return tuple(sum((self[i, j] * v[j] for j in range(self.cols)), Fraction(0)) for i in range(self.rows))

    def transpose(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def trace(self) -> Fraction:
        if not self.is_square:
            raise NonSquareError("trace of non-square matrix")
        return sum((self[i, i] for i in range(self.rows)), Fraction(0))

    def det(self) -> Fraction:
        if not self.is_square:
            raise NonSquareError("det of non-square matrix")
        n = self.rows
        a = [list(self.row(i)) for i in range(n)]
        det = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c]), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            det *= a[c][c]
            inv = 1 / a[c][c]
            for r in range(c + 1, n):
                if a[r][c]:
                    f = a[r][c] * inv
                    for j in range(c, n):
                        a[r][j] -= f * a[c][j]
        return det

    def inverse(self) -> "QMatrix":
        if not self.is_square:
            raise NonSquareError("inverse of non-square matrix")
        n = self.rows
        a = [list(self.row(i)) + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c]), None)
            if piv is None:
                raise NotInvertibleError("singular matrix")
            a[c], a[piv] = a[piv], a[c]
            inv = 1 / a[c][c]
            a[c] = [x * inv for x in a[c]]
            for r in range(n):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return QMatrix.from_rows([row[n:] for row in a])

    def is_integer(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)

    def to_floats(self) -> list[list[float]]:
        return [[float(x) for x in self.row(i)] for i in range(self.rows)]

    def to_json(self) -> list[list[str]]:
        return [[format_fraction(x) for x in self.row(i)] for i in range(self.rows)]

    @staticmethod
    def from_json(rows: Sequence[Sequence[RationalLike]]) -> "QMatrix":
        return QMatrix.from_rows(rows)


def mat_power(m: QMatrix, e: int) -> QMatrix:
    if not m.is_square:
        raise NonSquareError("power of non-square matrix")
    if e < 0:
        return mat_power(m.inverse(), -e)
    out = QMatrix.identity(m.rows)
    base = m
    while e:
        if e & 1:
            out = out @ base
        base = base @ base if e > 1 else base
        e >>= 1
    return out


# === row reduction, kernels, subspaces ===


def rref(m: QMatrix) -> tuple[QMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot column indices."""
    a = [list(m.row(i)) for i in range(m.rows)]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        piv = next((i for i in range(r, m.rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return QMatrix.from_rows(a), tuple(pivots)


def rank(m: QMatrix) -> int:
    return len(rref(m)[1])


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^n given by an independent basis of column vectors.

    The basis is canonicalized (reduced column echelon form), so two
    Subspace values compare equal exactly when they are the same subspace.
    An empty basis is the zero subspace.
    """

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_vectors(ambient_dim: int, vecs: Iterable[Sequence[RationalLike]]) -> "Subspace":
        cols = [tuple(to_fraction(x) for x in v) for v in vecs]
        for v in cols:
            if len(v) != ambient_dim:
                raise DimensionMismatchError("vector length mismatch")
        if not cols:
            return Subspace(ambient_dim, ())
        rows_mat = QMatrix.from_rows(cols)  # vectors as rows
        red, pivots = rref(rows_mat)
        basis = tuple(red.row(i) for i in range(len(pivots)))
        return Subspace(ambient_dim, basis)

    @staticmethod
    def zero(ambient_dim: int) -> "Subspace":
        return Subspace(ambient_dim, ())

    @staticmethod
    def full(ambient_dim: int) -> "Subspace":
        return Subspace.from_vectors(
            ambient_dim,
            [[1 if i == j else 0 for j in range(ambient_dim)] for i in range(ambient_dim)],
        )

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> QMatrix:
        """Basis vectors as the columns of an ambient_dim x dim matrix."""
        return QMatrix.from_columns(self.basis) if self.basis else QMatrix.zero(self.ambient_dim, 0)

    def contains(self, v: Sequence[RationalLike]) -> bool:
        vec = tuple(to_fraction(x) for x in v)
        if len(vec) != self.ambient_dim:
            raise DimensionMismatchError("vector length mismatch")
        return coordinates_in_span(self.basis, vec) is not None

    def to_json(self) -> list[list[str]]:
        return [[format_fraction(x) for x in b] for b in self.basis]


def coordinates_in_span(
    basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]
) -> tuple[Fraction, ...] | None:
    """Coordinates of v over the given independent vectors, or None."""
    if not basis:
        return () if not any(v) else None
    a = QMatrix.from_columns([tuple(b) for b in basis])
    return solve_exact(a, tuple(v))


def solve_exact(a: QMatrix, b: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
    """One exact solution of A x = b, or None when inconsistent.

    When the system is underdetermined the free variables are set to 0.
    """
    if len(b) != a.rows:
        raise DimensionMismatchError("rhs length mismatch")
    aug = QMatrix(a.rows, a.cols + 1, tuple(
        a.entries[i * a.cols + j] if j < a.cols else to_fraction(b[i])
        for i in range(a.rows) for j in range(a.cols + 1)
    ))
    red, pivots = rref(aug)
    if a.cols in pivots:
        return None
    x = [Fraction(0)] * a.cols
    for r, c in enumerate(pivots):
        x[c] = red[r, a.cols]
    return tuple(x)


def kernel(m: QMatrix) -> Subspace:
    """Exact null space basis via reduced row echelon form."""
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r, f]
        basis.append(tuple(v))
    return Subspace.from_vectors(m.cols, basis)


def is_invariant(space: Subspace, m: QMatrix) -> bool:
    """Exact test that m maps the subspace into itself."""
    if not m.is_square or m.cols != space.ambient_dim:
        raise DimensionMismatchError("matrix and subspace dimensions differ")
    for b in space.basis:
        if coordinates_in_span(space.basis, m.apply(b)) is None:
            return False
    return True


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Exact intersection of two subspaces of the same ambient space."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError("ambient dimensions differ")
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim)
    # null space of [A | -B] glues coordinates of common vectors
    am, bm = a.matrix(), b.matrix()
    glued = QMatrix(a.ambient_dim, a.dim + b.dim, tuple(
        am[i, j] if j < a.dim else -bm[i, j - a.dim]
        for i in range(a.ambient_dim) for j in range(a.dim + b.dim)
    ))
    vecs = []
    for k in kernel(glued).basis:
        coeff = k[: a.dim]
        vecs.append(tuple(
            sum((coeff[j] * a.basis[j][i] for j in range(a.dim)), Fraction(0))
            for i in range(a.ambient_dim)
        ))
    return Subspace.from_vectors(a.ambient_dim, vecs)


# === polynomials ===


@dataclass(frozen=True)
class QPoly:
    """Rational polynomial; coeffs[i] is the coefficient of z^i.

    Trailing zero coefficients are stripped; the zero polynomial has an
    empty coefficient tuple.
    """

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(coeffs: Sequence[RationalLike]) -> "QPoly":
        cs = [to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return QPoly(tuple(cs))

    @staticmethod
    def zero() -> "QPoly":
        return QPoly(())

    @staticmethod
    def one() -> "QPoly":
        return QPoly((Fraction(1),))

    @staticmethod
    def x() -> "QPoly":
        return QPoly((Fraction(0), Fraction(1)))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ZeroPolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def constant(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __call__(self, x: RationalLike) -> Fraction:
        x = to_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "QPoly") -> "QPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return QPoly.from_coeffs([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "QPoly") -> "QPoly":
        return self + (-other)

    def __neg__(self) -> "QPoly":
        return QPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "QPoly") -> "QPoly":
        if self.is_zero or other.is_zero:
            return QPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return QPoly.from_coeffs(out)

    def scale(self, c: RationalLike) -> "QPoly":
        c = to_fraction(c)
        return QPoly.from_coeffs([c * a for a in self.coeffs])

    def shift_scale_arg(self, r: RationalLike) -> "QPoly":
        """p(r*z) as a polynomial in z."""
        r = to_fraction(r)
        return QPoly.from_coeffs([c * r**i for i, c in enumerate(self.coeffs)])

    def divmod(self, other: "QPoly") -> tuple["QPoly", "QPoly"]:
        if other.is_zero:
            raise ZeroPolynomialError("division by zero polynomial")
        q = [Fraction(0)] * max(0, self.degree - other.degree + 1)
        r = list(self.coeffs)
        d = other.degree
        lc = other.leading
        while len(r) - 1 >= d and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < d:
                break
            k = len(r) - 1 - d
            f = r[-1] / lc
            q[k] = f
            for i, c in enumerate(other.coeffs):
                r[k + i] -= f * c
            r.pop()
        return QPoly.from_coeffs(q), QPoly.from_coeffs(r)

    def exact_div(self, other: "QPoly") -> "QPoly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ValueError("exact division with nonzero remainder")
        return q

    def derivative(self) -> "QPoly":
        return QPoly.from_coeffs([i * c for i, c in enumerate(self.coeffs)][1:])

    def reverse(self) -> "QPoly":
        """z^deg * p(1/z); requires a nonzero polynomial."""
        if self.is_zero:
            raise ZeroPolynomialError("reverse of zero polynomial")
        return QPoly.from_coeffs(tuple(reversed(self.coeffs)))

    def monic(self) -> "QPoly":
        if self.is_zero:
            raise ZeroPolynomialError("monic of zero polynomial")
        return self.scale(1 / self.leading)

    def primitive_int(self) -> tuple[int, ...]:
        """Primitive integer coefficient tuple with positive leading sign."""
        if self.is_zero:
            raise ZeroPolynomialError("primitive form of zero polynomial")
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*(abs(i) for i in ints))
        ints = [i // g for i in ints]
        if ints[-1] < 0:
            ints = [-i for i in ints]
        return tuple(ints)

    def compose(self, inner: "QPoly") -> "QPoly":
        acc = QPoly.zero()
        for c in reversed(self.coeffs):
            acc = acc * inner + QPoly.from_coeffs([c])
        return acc

    def to_json(self) -> list[str]:
        return [format_fraction(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                if i == 0:
                    parts.append(str(c))
                elif i == 1:
                    parts.append(f"{c}*z" if c != 1 else "z")
                else:
                    parts.append(f"{c}*z^{i}" if c != 1 else f"z^{i}")
        return " + ".join(reversed(parts)).replace("+ -", "- ")


def poly_of_matrix(p: QPoly, m: QMatrix) -> QMatrix:
    """p(M) by Horner's rule."""
    if not m.is_square:
        raise NonSquareError("polynomial of non-square matrix")
    n = m.rows
    acc = QMatrix.zero(n, n)
    ident = QMatrix.identity(n)
    for c in reversed(p.coeffs):
        acc = acc @ m + ident.scale(c)
    return acc


def char_poly(m: QMatrix) -> QPoly:
    """Monic characteristic polynomial det(zI - M), exactly.

    Uses the trace recurrence on M, M(M + c_1 I), ... which stays in exact
    rational arithmetic throughout.
    """
    if not m.is_square:
        raise NonSquareError("characteristic polynomial of non-square matrix")
    n = m.rows
    coeffs = [Fraction(1)]  # of z^n, then z^{n-1}, ...
    mk = m
    for k in range(1, n + 1):
        ck = -mk.trace() / k
        coeffs.append(ck)
        if k < n:
            mk = m @ (mk + QMatrix.identity(n).scale(ck))
    return QPoly.from_coeffs(list(reversed(coeffs)))


def minimal_poly(m: QMatrix) -> QPoly:
    """Monic minimal polynomial, by the first linear dependency among powers."""
    if not m.is_square:
        raise NonSquareError("minimal polynomial of non-square matrix")
    n = m.rows
    powers = [QMatrix.identity(n)]
    for d in range(1, n + 1):
        powers.append(powers[-1] @ m)
        stack = QMatrix.from_columns([p.entries for p in powers])
        coords = kernel(stack)
        if coords.dim > 0:
            for k in coords.basis:
                if k[d] != 0:
                    coeffs = [k[i] / k[d] for i in range(d + 1)]
                    return QPoly.from_coeffs(coeffs)
    raise AssertionError("no annihilating polynomial of degree <= n")


# === integer polynomial gcd (subresultant PRS) and Sturm machinery ===


def _int_prim(cs: Sequence[int], keep_sign: bool = False) -> tuple[int, ...]:
    cs = list(cs)
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        return ()
    g = math.gcd(*(abs(c) for c in cs))
    cs = [c // g for c in cs]
    if not keep_sign and cs[-1] < 0:
        cs = [-c for c in cs]
    return tuple(cs)


def _int_pseudo_rem(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """prem(a, b) = lc(b)^(deg a - deg b + 1) * a mod b, over the integers."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    steps = len(a) - 1 - db + 1
    for _ in range(steps):
        da = len(a) - 1
        if da < db or not any(a):
            a = [c * lb for c in a]
            steps -= 1
            continue
        lead = a[-1]
        a = [c * lb for c in a]
        k = da - db
        for i, c in enumerate(b):
            a[k + i] -= lead * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return tuple(a)


def _int_gcd(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Primitive gcd of two primitive integer polynomials, subresultant PRS."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return _int_prim(a)
    g, h = 1, 1
    p, q = list(a), list(b)
    while True:
        delta = (len(p) - 1) - (len(q) - 1)
        r = _int_pseudo_rem(p, q)
        if not r:
            return _int_prim(q)
        if len(r) == 1:
            return (1,)
        div = g * h**delta
        p, q = q, [c // div for c in r]
        g = p[-1]
        h = g**delta // h ** (delta - 1) if delta >= 1 else h
    raise AssertionError


def poly_gcd(a: QPoly, b: QPoly) -> QPoly:
    """Monic gcd over the rationals, via subresultant PRS on integer forms."""
    if a.is_zero and b.is_zero:
        return QPoly.zero()
    if a.is_zero:
        return b.monic()
    if b.is_zero:
        return a.monic()
    g = _int_gcd(a.primitive_int(), b.primitive_int())
    return QPoly.from_coeffs(g).monic()


def squarefree_part(p: QPoly) -> QPoly:
    """p with every distinct root once, monic."""
    if p.is_zero:
        raise ZeroPolynomialError("squarefree part of zero polynomial")
    if p.degree == 0:
        return QPoly.one()
    return p.exact_div(poly_gcd(p, p.derivative())).monic()


def root_multiplicity(p: QPoly, r: RationalLike) -> tuple[int, QPoly]:
    """Multiplicity of the rational root r, and p with those factors removed."""
    r = to_fraction(r)
    lin = QPoly.from_coeffs([-r, 1])
    mult = 0
    while not p.is_zero and p(r) == 0:
        p = p.exact_div(lin)
        mult += 1
    return mult, p


def rational_roots(p: QPoly) -> list[Fraction]:
    """All rational roots, by the rational root test on the integer form."""
    if p.is_zero:
        raise ZeroPolynomialError("rational roots of zero polynomial")
    ints = list(p.primitive_int())
    shift = 0
    while ints[0] == 0:
        ints.pop(0)
        shift += 1
    roots = [Fraction(0)] if shift else []
    if len(ints) == 1:
        return roots
    a0, an = abs(ints[0]), abs(ints[-1])
    ps = [d for d in range(1, a0 + 1) if a0 % d == 0]
    qs = [d for d in range(1, an + 1) if an % d == 0]
    q = QPoly.from_coeffs(ints)
    seen = set()
    for num in ps:
        for den in qs:
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if cand not in seen:
                    seen.add(cand)
                    if q(cand) == 0:
                        roots.append(cand)
    return sorted(roots)


def _sign(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


def _int_scaled(p: QPoly) -> list[int]:
    den = math.lcm(*(c.denominator for c in p.coeffs))
    return [int(c * den) for c in p.coeffs]


def _neg_rem_int(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Primitive integer form of -(a mod b), scaled by positive rationals only."""
    r = QPoly.from_coeffs(a).divmod(QPoly.from_coeffs(b))[1]
    if r.is_zero:
        return ()
    return _int_prim(_int_scaled(-r), keep_sign=True)


def _sturm_chain(p: QPoly) -> list[tuple[int, ...]]:
    """Sturm chain of a squarefree p, on primitive integer forms.

    Each entry is rescaled by a positive rational only, so the sign
    structure of the classical chain is preserved.
    """
    chain = [_int_prim(_int_scaled(p), keep_sign=True)]
    dp = p.derivative()
    if dp.is_zero:
        return chain
    chain.append(_int_prim(_int_scaled(dp), keep_sign=True))
    while len(chain[-1]) > 1:
        r = _neg_rem_int(chain[-2], chain[-1])
        if not r:
            break
        chain.append(r)
    return chain


def _variations(signs: Sequence[int]) -> int:
    v = 0
    prev = 0
    for s in signs:
        if s:
            if prev and s != prev:
                v += 1
            prev = s
    return v


def _chain_signs_at(chain: Sequence[Sequence[int]], x: Fraction) -> list[int]:
    out = []
    for cs in chain:
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        out.append(_sign(acc))
    return out


def _chain_signs_at_inf(chain: Sequence[Sequence[int]], positive: bool) -> list[int]:
    out = []
    for cs in chain:
        if not cs:
            out.append(0)
            continue
        lead = _sign(cs[-1])
        deg = len(cs) - 1
        out.append(lead if positive or deg % 2 == 0 else -lead)
    return out


def sturm_root_count(p: QPoly, lo: RationalLike, hi: RationalLike) -> int:
    """Number of distinct real roots of p in (lo, hi], exactly.

    Computed by a Sturm chain on the squarefree part; roots at lo are
    excluded and roots at hi included, with sign evaluations taken as
    right-hand limits so root endpoints need no special casing.
    """
    if p.is_zero:
        raise ZeroPolynomialError("root count of zero polynomial")
    lo, hi = to_fraction(lo), to_fraction(hi)
    if not lo < hi:
        raise ValueError("need lo < hi")
    f = squarefree_part(p)
    if f.degree < 1:
        return 0
    chain = _sturm_chain(f)
    # dropping zeros in the variation count evaluates right-hand limits, so
    # V(lo) - V(hi) counts roots in (lo, hi] with no endpoint special cases
    vlo = _variations(_chain_signs_at(chain, lo))
    vhi = _variations(_chain_signs_at(chain, hi))
    return vlo - vhi


def sturm_count_real_roots(p: QPoly) -> int:
    """Number of distinct real roots of p, exactly."""
    if p.is_zero:
        raise ZeroPolynomialError("root count of zero polynomial")
    f = squarefree_part(p)
    if f.degree < 1:
        return 0
    chain = _sturm_chain(f)
    return _variations(_chain_signs_at_inf(chain, False)) - _variations(_chain_signs_at_inf(chain, True))


def cauchy_index(num: QPoly, den: QPoly) -> int:
    """Cauchy index of num/den over the whole real line.

    Computed with the generalized Sturm chain f0 = den, f1 = num,
    f_{k+1} = -(f_{k-1} mod f_k); the index is V(-inf) - V(+inf).
    Requires gcd(num, den) constant.
    """
    if den.is_zero:
        raise ZeroPolynomialError("Cauchy index with zero denominator")
    if num.is_zero:
        return 0
    chain = [_int_prim(_int_scaled(den), keep_sign=True), _int_prim(_int_scaled(num), keep_sign=True)]
    while len(chain[-1]) > 1:
        r = _neg_rem_int(chain[-2], chain[-1])
        if not r:
            break
        chain.append(r)
    return _variations(_chain_signs_at_inf(chain, False)) - _variations(_chain_signs_at_inf(chain, True))


# === reciprocal split ===


def reciprocal_split(p: QPoly) -> tuple[QPoly, QPoly]:
    """Split p into its reciprocal-closed factor and the rest.

    Returns (g, q) with g = gcd(p, reverse(p)) monic and q = p / g.  Every
    root of p of modulus one lies in g with full multiplicity; q has no
    root pair {w, 1/w} and in particular no roots on the unit circle.
    Requires p(0) != 0.
    """
    if p.is_zero:
        raise ZeroPolynomialError("reciprocal split of zero polynomial")
    if p.constant == 0:
        raise ZeroConstantTermError("reciprocal split requires a nonzero constant term")
    if p.degree == 0:
        return QPoly.one(), p
    g = poly_gcd(p, p.reverse())
    return g, p.exact_div(g)


# === exact definiteness tests ===


def is_symmetric(m: QMatrix) -> bool:
    return m.is_square and all(
        m[i, j] == m[j, i] for i in range(m.rows) for j in range(i + 1, m.cols)
    )


def is_positive_semidefinite(m: QMatrix) -> bool:
    """Exact PSD test for a symmetric rational matrix via congruence elimination."""
    if not is_symmetric(m):
        raise NonSquareError("definiteness test requires a symmetric matrix")
    n = m.rows
    a = [[m[i, j] for j in range(n)] for i in range(n)]
    for i in range(n):
        piv = a[i][i]
        if piv < 0:
            return False
        if piv == 0:
            # a zero diagonal pivot forces its whole row to vanish
            if any(a[i][j] != 0 for j in range(i + 1, n)):
                return False
            continue
        for r in range(i + 1, n):
            f = a[r][i] / piv
            if f == 0:
                continue
            for c in range(i, n):
                a[r][c] -= f * a[i][c]
    return True


def is_positive_definite(m: QMatrix) -> bool:
    """Exact PD test: all elimination pivots strictly positive."""
    if not is_symmetric(m):
        raise NonSquareError("definiteness test requires a symmetric matrix")
    n = m.rows
    a = [[m[i, j] for j in range(n)] for i in range(n)]
    for i in range(n):
        piv = a[i][i]
        if piv <= 0:
            return False
        for r in range(i + 1, n):
            f = a[r][i] / piv
            if f == 0:
                continue
            for c in range(i, n):
                a[r][c] -= f * a[i][c]
    return True
