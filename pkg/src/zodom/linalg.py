"""Exact integer and rational linear algebra for lattice computations.

Everything runs over Python ints and :class:`fractions.Fraction`, so all
results are exact.  Matrices are small (d <= 4 by design), so the algorithms
favour clarity and predictable cost: Bareiss for determinants, classical
column reduction for Hermite forms, classical Smith reduction with tracked
transforms.

Conventions fixed here and relied on by every other module:

* Hermite normal form is the *column* form: lower-triangular, positive
  diagonal, and in each row ``i`` the off-diagonal entries satisfy
  ``0 <= h[i][j] < h[i][i]`` for ``j < i``.
* A :class:`Lattice` is stored as ``(1/den) * mat`` with ``mat`` an integer
  matrix in HNF whose columns generate the lattice and ``den`` minimal.
  Lattice equality is therefore a syntactic check.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, inf, lcm


class SingularMatrixError(ValueError):
    """A matrix is singular where an invertible one is required."""


class NotSublatticeError(ValueError):
    """`index` was called on a pair that is not nested."""


# ---------------------------------------------------------------------------
# small number theory helpers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorint(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division.  factorint(12) == {2: 2, 3: 1}."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero int or Fraction."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0 is undefined")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# integer matrix kernels (lists of rows)


def _int_det(rows: list[list[int]]) -> int:
    """Fraction-free Bareiss determinant of a square integer matrix."""
    a = [row[:] for row in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return sign * a[-1][-1]


def _column_echelon(rows: list[list[int]]):
    """Lower column-echelon form by unimodular column operations.

    Returns ``(h, v, pivots)`` with ``h = rows . v``, ``v`` unimodular, and
    ``pivots`` the list of pivot rows (one per leading column).  Pivot entries
    are positive and entries to their left in the same row are reduced into
    ``[0, pivot)``.
    """
    m = [row[:] for row in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def colswap(a, b):
        for r in range(nr):
            m[r][a], m[r][b] = m[r][b], m[r][a]
        for r in range(nc):
            v[r][a], v[r][b] = v[r][b], v[r][a]

    def coladd(dst, src, q):
        # column dst += q * column src
        for r in range(nr):
            m[r][dst] += q * m[r][src]
        for r in range(nc):
            v[r][dst] += q * v[r][src]

    pivots: list[int] = []
    col = 0
    for row in range(nr):
        if col >= nc:
            break
        while True:
            jmin = -1
            best = 0
            for j in range(col, nc):
                a = abs(m[row][j])
                if a != 0 and (jmin < 0 or a < best):
                    jmin, best = j, a
            if jmin < 0:
                break
            if jmin != col:
                colswap(col, jmin)
            done = True
            for j in range(col + 1, nc):
                if m[row][j] != 0:
                    coladd(j, col, -(m[row][j] // m[row][col]))
                    if m[row][j] != 0:
                        done = False
            if done:
                break
        if jmin < 0:
            continue
        if m[row][col] < 0:
            for r in range(nr):
                m[r][col] = -m[r][col]
            for r in range(nc):
                v[r][col] = -v[r][col]
        for j in range(col):
            coladd(j, col, -(m[row][j] // m[row][col]))
        pivots.append(row)
        col += 1
    return m, v, pivots


def hnf(rows) -> list[list[int]]:
    """Column Hermite normal form of a square nonsingular integer matrix.

    >>> hnf([[0, 1], [1, 0]])
    [[1, 0], [0, 1]]
    >>> hnf([[2, 0], [1, 3]])
    [[2, 0], [1, 3]]
    """
    rows = [list(map(int, r)) for r in rows]
    n = len(rows)
    h, _, pivots = _column_echelon(rows)
    if len(pivots) < n:
        raise SingularMatrixError("matrix has no column Hermite form: det = 0")
    return h


def snf(rows):
    """Smith normal form with transforms: returns (u, s, v) with u.m.v = s.

    ``s`` is diagonal with s[0][0] | s[1][1] | ... and u, v unimodular.
    Works for any rectangular integer matrix; the primary contract is the
    square nonsingular case.

    >>> u, s, v = snf([[2, 0], [1, 3]])
    >>> [s[0][0], s[1][1]]
    [1, 6]
    """
    a = [list(map(int, r)) for r in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def rowop(dst, src, q):  # row dst += q * row src (a and u)
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def colop(dst, src, q):
        for r in range(nr):
            a[r][dst] += q * a[r][src]
        for r in range(nc):
            v[r][dst] += q * v[r][src]

    def rowswap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def colswap(i, j):
        for r in range(nr):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(nc):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    t = 0
    while True:
        # locate smallest nonzero entry in the remaining block
        pi = pj = -1
        best = 0
        for i in range(t, nr):
            for j in range(t, nc):
                x = abs(a[i][j])
                if x != 0 and (pi < 0 or x < best):
                    pi, pj, best = i, j, x
        if pi < 0:
            break
        rowswap(t, pi)
        colswap(t, pj)
        # clear row and column t
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    rowop(i, t, -q)
                    if a[i][t] != 0:  # remainder became the smaller pivot
                        rowswap(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    colop(j, t, -q)
                    if a[t][j] != 0:
                        colswap(t, j)
                        dirty = True
        # divisibility: pivot must divide every later entry
        fixed = True
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % a[t][t] != 0:
                    rowop(t, i, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, a, v


class IntegerSolver:
    """Solves rows . x = rhs over Z for many right-hand sides.

    The column echelon form of the coefficient matrix is computed once; each
    solve is then a forward substitution plus a consistency check.
    """

    __slots__ = ("nr", "nc", "_h", "_v", "_pivots")

    def __init__(self, rows):
        a = [list(map(int, r)) for r in rows]
        self.nr = len(a)
        self.nc = len(a[0]) if self.nr else 0
        self._h, self._v, self._pivots = _column_echelon(a)

    def solve(self, rhs):
        y = [0] * self.nc
        r = [int(b) for b in rhs]
        for j, prow in enumerate(self._pivots):
            piv = self._h[prow][j]
            if r[prow] % piv != 0:
                return None
            q = r[prow] // piv
            y[j] = q
            if q:
                col = self._h
                for i in range(prow, self.nr):
                    r[i] -= q * col[i][j]
        if any(r):
            return None
        v = self._v
        return [sum(v[i][j] * y[j] for j in range(self.nc)) for i in range(self.nc)]


def solve_integer(rows, rhs):
    """One integer solution x of rows . x = rhs, or None if unsolvable over Z."""
    return IntegerSolver(rows).solve(rhs)


def integer_kernel(rows) -> list[list[int]]:
    """Basis (list of columns) of {x in Z^nc : rows . x = 0}; always saturated."""
    a = [list(map(int, r)) for r in rows]
    nc = len(a[0]) if a else 0
    h, v, pivots = _column_echelon(a)
    lead = len(pivots)
    return [[v[i][j] for i in range(nc)] for j in range(lead, nc)]


# ---------------------------------------------------------------------------
# rational matrices


def _as_fraction_rows(rows):
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


class Mat:
    """Immutable square rational matrix; rows of Fractions.

    >>> m = Mat([[0, 1], [1, 0]])
    >>> m * m == Mat.identity(2)
    True
    """

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = _as_fraction_rows(rows)
        d = len(self.rows)
        if d == 0 or any(len(r) != d for r in self.rows):
            raise ValueError("Mat must be square and nonempty")

    @classmethod
    def identity(cls, d: int) -> "Mat":
        return cls([[1 if i == j else 0 for j in range(d)] for i in range(d)])

    @classmethod
    def from_columns(cls, cols) -> "Mat":
        cols = list(cols)
        d = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(d)])

    @property
    def d(self) -> int:
        return len(self.rows)

    def col(self, j: int):
        return tuple(self.rows[i][j] for i in range(self.d))

    def columns(self):
        return [self.col(j) for j in range(self.d)]

    def transpose(self) -> "Mat":
        return Mat([[self.rows[j][i] for j in range(self.d)] for i in range(self.d)])

    def __mul__(self, other: "Mat") -> "Mat":
        if not isinstance(other, Mat):
            return NotImplemented
        d = self.d
        return Mat(
            [
                [sum(self.rows[i][k] * other.rows[k][j] for k in range(d)) for j in range(d)]
                for i in range(d)
            ]
        )

    def apply(self, v):
        """Matrix times column vector."""
        return tuple(sum(row[j] * Fraction(v[j]) for j in range(self.d)) for row in self.rows)

    def scale(self, c) -> "Mat":
        c = Fraction(c)
        return Mat([[x * c for x in row] for row in self.rows])

    def det(self) -> Fraction:
        den = lcm(*[x.denominator for row in self.rows for x in row], 1)
        ints = [[int(x * den) for x in row] for row in self.rows]
        return Fraction(_int_det(ints), den**self.d)

    def inv(self) -> "Mat":
        """Inverse by Gauss-Jordan over Fractions."""
        d = self.d
        a = [list(row) for row in self.rows]
        b = [[Fraction(1 if i == j else 0) for j in range(d)] for i in range(d)]
        for col in range(d):
            piv = next((r for r in range(col, d) if a[r][col] != 0), None)
            if piv is None:
                raise SingularMatrixError("matrix is not invertible")
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
            pv = a[col][col]
            a[col] = [x / pv for x in a[col]]
            b[col] = [x / pv for x in b[col]]
            for r in range(d):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    b[r] = [x - f * y for x, y in zip(b[r], b[col])]
        return Mat(b)

    def is_integer(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def is_unimodular(self) -> bool:
        return self.is_integer() and abs(self.det()) == 1

    def __eq__(self, other):
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(",".join(str(x) for x in row) for row in self.rows)
        return f"Mat([{body}])"


# ---------------------------------------------------------------------------
# lattices


class Lattice:
    """Full-rank lattice in Q^d, canonicalized as (1/den) * (integer HNF).

    The columns of :meth:`basis` generate the lattice.  Two lattices are equal
    iff their canonical data coincide.
    """

    __slots__ = ("d", "den", "mat")

    def __init__(self, basis: Mat):
        cols = basis.columns()
        lat = _canonical_from_columns(basis.d, cols)
        if lat is None:
            raise SingularMatrixError("lattice basis must have nonzero determinant")
        self.d, self.den, self.mat = lat

    @classmethod
    def _raw(cls, d: int, den: int, mat) -> "Lattice":
        obj = object.__new__(cls)
        obj.d, obj.den, obj.mat = d, den, mat
        return obj

    @classmethod
    def standard(cls, d: int) -> "Lattice":
        ident = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
        return cls._raw(d, 1, ident)

    @classmethod
    def from_span(cls, d: int, vectors) -> "Lattice":
        """Lattice generated by a (possibly redundant) list of rational vectors."""
        lat = _canonical_from_columns(d, list(vectors))
        if lat is None:
            raise SingularMatrixError("spanning set is not full rank")
        return cls._raw(*lat)

    def basis(self) -> Mat:
        return Mat([[Fraction(x, self.den) for x in row] for row in self.mat])

    def basis_columns(self):
        return self.basis().columns()

    def det(self) -> Fraction:
        d = Fraction(_int_det([list(r) for r in self.mat]), self.den**self.d)
        return abs(d)

    def diagonal(self):
        """HNF diagonal of the integer part (den must be 1 for coset boxes)."""
        return tuple(self.mat[i][i] for i in range(self.d))

    def solve(self, v):
        """Coordinates x with basis . x = v (forward substitution, basis is triangular)."""
        x = []
        v = [Fraction(t) for t in v]
        for i in range(self.d):
            acc = v[i] - sum(Fraction(self.mat[i][j], self.den) * x[j] for j in range(i))
            x.append(acc / Fraction(self.mat[i][i], self.den))
        return tuple(x)

    def member(self, v) -> bool:
        return all(c.denominator == 1 for c in self.solve(v))

    def dual(self) -> "Lattice":
        return Lattice(self.basis().inv().transpose())

    def contains(self, other: "Lattice") -> bool:
        return all(self.member(c) for c in other.basis_columns())

    def is_integral(self) -> bool:
        return self.den == 1

    def __eq__(self, other):
        return (
            isinstance(other, Lattice)
            and (self.d, self.den, self.mat) == (other.d, other.den, other.mat)
        )

    def __hash__(self):
        return hash((self.d, self.den, self.mat))

    def __repr__(self):
        body = "; ".join(",".join(str(x) for x in row) for row in self.mat)
        return f"Lattice(1/{self.den} * [{body}])"


def _canonical_from_columns(d: int, cols):
    """(d, den, hnf-rows) for the lattice spanned by the columns, or None if rank < d."""
    cols = [tuple(Fraction(x) for x in c) for c in cols]
    if not cols or any(len(c) != d for c in cols):
        raise ValueError("bad column data")
    den = lcm(*[x.denominator for c in cols for x in c], 1)
    rows = [[int(cols[j][i] * den) for j in range(len(cols))] for i in range(d)]
    h, _, pivots = _column_echelon(rows)
    if len(pivots) < d:
        return None
    cut = [row[:d] for row in h]
    g = den
    for row in cut:
        for x in row:
            g = gcd(g, x)
    g = max(g, 1)
    return d, den // g, tuple(tuple(x // g for x in row) for row in cut)


def dual_lattice(lat: Lattice) -> Lattice:
    """Dual lattice: all vectors pairing integrally with every lattice element.

    >>> dual_lattice(Lattice(Mat([[Fraction(1, 2), 0], [0, 1]]))).mat
    ((2, 0), (0, 1))
    """
    return lat.dual()


def index(sub: Lattice, sup: Lattice) -> Fraction:
    """[sup : sub] for nested lattices; a positive integer as a Fraction."""
    if sub.d != sup.d:
        raise NotSublatticeError("dimension mismatch")
    if not sup.contains(sub):
        raise NotSublatticeError("first lattice is not contained in the second")
    return sub.det() / sup.det()


def member(v, lat: Lattice) -> bool:
    if len(v) != lat.d:
        raise ValueError("dimension mismatch")
    return lat.member(v)


def lattice_sum(*lats: Lattice) -> Lattice:
    d = lats[0].d
    cols = []
    for lat in lats:
        if lat.d != d:
            raise ValueError("dimension mismatch")
        cols.extend(lat.basis_columns())
    return Lattice.from_span(d, cols)


def lattice_intersect(a: Lattice, b: Lattice) -> Lattice:
    # duality swaps sums and intersections of full-rank lattices
    return lattice_sum(a.dual(), b.dual()).dual()


def lattice_scale(lat: Lattice, c) -> Lattice:
    c = Fraction(c)
    if c == 0:
        raise ValueError("scale factor must be nonzero")
    return Lattice(lat.basis().scale(c))


def lattice_block(a: Lattice, b: Lattice) -> Lattice:
    """Block-diagonal direct sum of two lattices."""
    d = a.d + b.d
    cols = [tuple(c) + (0,) * b.d for c in a.basis_columns()]
    cols += [(0,) * a.d + tuple(c) for c in b.basis_columns()]
    return Lattice.from_span(d, cols)


def p_primary_over_standard(lat: Lattice, p: int) -> Lattice:
    """The intermediate lattice Z^d <= L' <= L with [L' : Z^d] the p-part of [L : Z^d].

    Multiplying by the prime-to-p part of the index kills the prime-to-p
    torsion of L/Z^d and is bijective on the p-part.
    """
    zd = Lattice.standard(lat.d)
    idx = index(zd, lat)
    n = int(idx)
    np_part = n // p ** valuation(n, p) if n > 1 else 1
    if np_part == 1:
        return lat
    return lattice_sum(zd, lattice_scale(lat, np_part))


# ---------------------------------------------------------------------------
# rational subspaces (for divisible directions)


def rref(rows):
    """Reduced row echelon form over Q; returns the nonzero rows."""
    a = [[Fraction(x) for x in row] for row in rows]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    lead = 0
    out = []
    for col in range(nc):
        piv = next((r for r in range(lead, nr) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[lead], a[piv] = a[piv], a[lead]
        pv = a[lead][col]
        a[lead] = [x / pv for x in a[lead]]
        for r in range(nr):
            if r != lead and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[lead])]
        lead += 1
        if lead == nr:
            break
    for r in range(lead):
        out.append(tuple(a[r]))
    return out


def subspace_basis(vectors, d):
    """Canonical basis of the span: RREF rows rescaled to primitive integer vectors."""
    vecs = [v for v in vectors if any(Fraction(x) != 0 for x in v)]
    if not vecs:
        return ()
    out = []
    for row in rref(vecs):
        den = lcm(*[x.denominator for x in row], 1)
        ints = [int(x * den) for x in row]
        g = 0
        for x in ints:
            g = gcd(g, x)
        out.append(tuple(x // g for x in ints))
    return tuple(out)


def subspace_contains(basis, v) -> bool:
    """Whether v lies in the span of echelonized basis rows."""
    v = [Fraction(x) for x in v]
    for row in basis:
        piv = next(j for j, x in enumerate(row) if x != 0)
        if v[piv] != 0:
            f = v[piv] / row[piv]
            v = [x - f * Fraction(y) for x, y in zip(v, row)]
    return all(x == 0 for x in v)


def annihilator(basis, d):
    """Canonical basis of {f in Q^d : <f, v> = 0 for all v in the span}."""
    if not basis:
        return subspace_basis([tuple(1 if i == j else 0 for j in range(d)) for i in range(d)], d)
    rows = rref(basis)
    pivots = [next(j for j, x in enumerate(row) if x != 0) for row in rows]
    free = [j for j in range(d) if j not in pivots]
    out = []
    for f in free:
        w = [Fraction(0)] * d
        w[f] = Fraction(1)
        for row, pj in zip(rows, pivots):
            w[pj] = -row[f]
        out.append(tuple(w))
    return subspace_basis(out, d)


def saturation(basis, d) -> list:
    """Basis (columns) of span(basis) intersected with Z^d."""
    if not basis:
        return []
    ann = annihilator(basis, d)
    if not ann:  # span is all of Q^d
        return [[1 if i == j else 0 for i in range(d)] for j in range(d)]
    den = lcm(*[x.denominator for row in ann for x in row], 1)
    rows = [[int(x * den) for x in row] for row in ann]
    return integer_kernel(rows)


def complete_to_basis(kernel_cols, d):
    """Unimodular integer matrix whose last r columns span the given saturated rank-r sublattice."""
    r = len(kernel_cols)
    if r == 0:
        return Mat.identity(d)
    rows = [[kernel_cols[j][i] for j in range(r)] for i in range(d)]
    u, s, _ = snf(rows)
    for i in range(r):
        if abs(s[i][i]) != 1:
            raise ValueError("kernel columns are not saturated")
    uinv = Mat([[Fraction(x) for x in row] for row in u]).inv()
    cols = uinv.columns()
    ordered = cols[r:] + cols[:r]
    return Mat.from_columns(ordered)


# ---------------------------------------------------------------------------
# supernatural numbers


INF = inf  # exponent value for infinitely divisible primes


class Supernatural:
    """Formal product of p^e with e a positive integer or INF.

    >>> str(Supernatural({2: INF, 5: 1}))
    '2^inf*5^1'
    >>> str(Supernatural({}))
    '1'
    """

    __slots__ = ("items",)

    def __init__(self, exponents):
        cleaned = {}
        for p, e in dict(exponents).items():
            if e == 0:
                continue
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if e != INF and (not isinstance(e, int) or e < 0):
                raise ValueError(f"bad exponent {e!r} for prime {p}")
            cleaned[p] = e
        self.items = tuple(sorted(cleaned.items()))

    @classmethod
    def from_int(cls, n: int) -> "Supernatural":
        return cls(factorint(n)) if abs(n) != 1 else cls({})

    def exponent(self, p: int):
        for q, e in self.items:
            if q == p:
                return e
        return 0

    def primes(self):
        return tuple(p for p, _ in self.items)

    def __mul__(self, other: "Supernatural") -> "Supernatural":
        out = dict(self.items)
        for p, e in other.items:
            out[p] = out.get(p, 0) + e
        return Supernatural(out)

    def divides(self, other: "Supernatural") -> bool:
        return all(e <= other.exponent(p) for p, e in self.items)

    def __eq__(self, other):
        return isinstance(other, Supernatural) and self.items == other.items

    def __hash__(self):
        return hash(self.items)

    def __str__(self):
        if not self.items:
            return "1"
        return "*".join(f"{p}^{'inf' if e == INF else e}" for p, e in self.items)

    def __repr__(self):
        return f"Supernatural({dict(self.items)!r})"


def denominator_primes(v) -> set[int]:
    """Primes dividing any denominator of the rational vector entries."""
    out: set[int] = set()
    for x in v:
        den = Fraction(x).denominator
        if den > 1:
            out.update(factorint(den))
    return out
