"""Finite presentations of groups Z^d <= H <= Q^d and their towers.

A group in the representable class is described by finite *local* data: for
each prime p in a finite support, a module

    M_p = B_p (Zp^{d-r} + Qp^r)

given by an adapted basis ``B_p`` whose last ``r`` columns span the divisible
subspace V_p and whose d columns generate a lattice L(p) with Z^d <= L(p) of
p-power index.  The group is H = {v in Q^d : v in M_p for every p}, and a
rational vector lies in M_p iff the first d-r coordinates of B_p^-1 v are
p-integral.

Groups needing infinitely many primes are handled by the PROGRAM kind
(:class:`ProgramGroup`): an on-demand sequence of integer multiplier matrices
defines an increasing chain of lattices whose union is the group; membership
and superindex are computed up to a depth cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd, lcm

from .linalg import (
    INF,
    Lattice,
    Mat,
    SingularMatrixError,
    Supernatural,
    annihilator,
    complete_to_basis,
    denominator_primes,
    factorint,
    index,
    integer_kernel,
    is_prime,
    lattice_intersect,
    lattice_scale,
    lattice_sum,
    p_primary_over_standard,
    saturation,
    subspace_basis,
    valuation,
)


class UnsupportedPresentationError(ValueError):
    """Operation requires a LOCAL presentation."""


class DepthExceededError(ValueError):
    """PROGRAM-kind query undecided within the depth cap."""


class NotSupergroupError(ValueError):
    """Resulting group would not contain Z^d."""


class LocalEntry:
    """Local data of H at one prime: adapted basis, divisibility rank, caches."""

    __slots__ = ("p", "basis", "r", "lattice", "vspan", "_basis_inv", "_sat")

    def __init__(self, p, basis, r, lattice, vspan):
        self.p = p
        self.basis = basis
        self.r = r
        self.lattice = lattice
        self.vspan = vspan
        self._basis_inv = basis.inv()
        # saturated integer basis of V_p, used for tower levels
        self._sat = tuple(tuple(c) for c in saturation(vspan, basis.d))

    @property
    def d(self):
        return self.basis.d

    def member_local(self, v) -> bool:
        """v in M_p: first d-r coordinates of B^-1 v must be p-integral."""
        w = self._basis_inv.apply(v)
        return all(w[i].denominator % self.p != 0 for i in range(self.d - self.r))

    def index_valuation(self) -> int:
        """v_p of the lattice-part index [L(p) : Z^d]."""
        return valuation(int(index(Lattice.standard(self.d), self.lattice)), self.p)

    def __eq__(self, other):
        return (
            isinstance(other, LocalEntry)
            and (self.p, self.r, self.lattice, self.vspan)
            == (other.p, other.r, other.lattice, other.vspan)
        )

    def __hash__(self):
        return hash((self.p, self.r, self.lattice, self.vspan))

    def __repr__(self):
        return f"LocalEntry(p={self.p}, r={self.r}, lattice={self.lattice!r}, vspan={self.vspan!r})"


def _make_entry(d: int, p: int, lattice_gens, divisible_gens):
    """Canonical LocalEntry from raw generators at p, or None if trivial."""
    if not is_prime(p):
        raise ValueError(f"support key {p} is not prime")
    vspan = subspace_basis(list(divisible_gens), d)
    r = len(vspan)
    zd = Lattice.standard(d)
    gens = [tuple(Fraction(x) for x in g) for g in lattice_gens]
    lat = Lattice.from_span(d, list(zd.basis_columns()) + gens) if gens else zd
    lat = p_primary_over_standard(lat, p)
    if r == 0 and lat == zd:
        return None
    blat = lat.basis()
    if 0 < r < d:
        # adapted basis: complete a basis of L(p) so the last r columns span
        # L(p) n V_p; the kernel is computed in L(p)-coordinates.
        ann = annihilator(vspan, d)
        prod = [
            [sum(Fraction(a[i]) * blat.rows[i][j] for i in range(d)) for j in range(d)]
            for a in ann
        ]
        den = lcm(*[x.denominator for row in prod for x in row], 1)
        ker = integer_kernel([[int(x * den) for x in row] for row in prod])
        basis = blat * complete_to_basis(ker, d)
    else:
        basis = blat
    return LocalEntry(p, basis, r, lat, vspan)


class HGroup:
    """LOCAL presentation of Z^d <= H <= Q^d; entries sorted by prime."""

    __slots__ = ("d", "entries", "_by_prime")

    kind = "LOCAL"

    def __init__(self, d: int, entries):
        self.d = d
        self.entries = tuple(sorted(entries, key=lambda e: e.p))
        self._by_prime = {e.p: e for e in self.entries}
        if len(self._by_prime) != len(self.entries):
            raise ValueError("duplicate primes in support")

    @classmethod
    def standard(cls, d: int) -> "HGroup":
        return cls(d, ())

    @classmethod
    def from_local_data(cls, d: int, data) -> "HGroup":
        """data: {p: (lattice_gens, divisible_gens)}; trivial entries dropped."""
        entries = []
        for p in sorted(data):
            lat_gens, div_gens = data[p]
            e = _make_entry(d, p, lat_gens, div_gens)
            if e is not None:
                entries.append(e)
        return cls(d, entries)

    def support(self):
        return tuple(e.p for e in self.entries)

    def entry(self, p: int):
        return self._by_prime.get(p)

    def local_data(self):
        return {
            e.p: ([tuple(c) for c in e.lattice.basis_columns()], [tuple(w) for w in e.vspan])
            for e in self.entries
        }

    def __eq__(self, other):
        # syntactic equality of canonical data; semantic equality is equal_h
        return (
            isinstance(other, HGroup)
            and self.d == other.d
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.d, self.entries))

    def __repr__(self):
        return f"HGroup(d={self.d}, support={self.support()})"


class ProgramGroup:
    """PROGRAM presentation: increasing chain H_n = Z^d . (a_1 ... a_n)^-1.

    ``multiplier(n)`` (1-based) must return an integer Mat; successive
    determinants must be pairwise coprime (as in the rigid construction,
    where they are distinct primes).  Coprimality is what makes membership
    decidable at the depth cap: a vector whose denominator primes all occur
    among the first ``depth_cap`` level determinants lies in the group iff
    it lies in the deepest materialized level.  Elements of Z^d are row
    vectors in this convention, so the column basis of H_n is the inverse
    transpose of the product matrix.
    """

    kind = "PROGRAM"

    def __init__(self, d: int, multiplier, depth_cap: int):
        self.d = d
        self.depth_cap = depth_cap
        self._multiplier = multiplier
        self._products: list[Mat] = []  # P_n = a_1 ... a_n
        self._dets: list[int] = []

    def _extend_to(self, n: int):
        if n > self.depth_cap:
            raise DepthExceededError(f"level {n} exceeds depth cap {self.depth_cap}")
        while len(self._products) < n:
            k = len(self._products) + 1
            a = self._multiplier(k)
            if not a.is_integer():
                raise ValueError("multiplier matrices must be integral")
            det = abs(int(a.det()))
            for earlier in self._dets:
                if gcd(earlier, det) != 1:
                    raise ValueError(
                        f"level determinants must be pairwise coprime, got "
                        f"{earlier} and {det}"
                    )
            prod = self._products[-1] * a if self._products else a
            self._products.append(prod)
            self._dets.append(det)

    def level(self, n: int) -> Lattice:
        """H_n as a lattice; level 0 is Z^d."""
        if n == 0:
            return Lattice.standard(self.d)
        self._extend_to(n)
        return Lattice(self._products[n - 1].transpose().inv())

    def level_dual(self, n: int) -> Lattice:
        if n == 0:
            return Lattice.standard(self.d)
        self._extend_to(n)
        return Lattice(self._products[n - 1])

    def level_primes(self, n: int):
        self._extend_to(n)
        out: set[int] = set()
        for det in self._dets[:n]:
            out.update(factorint(det))
        return out

    def __repr__(self):
        return f"ProgramGroup(d={self.d}, depth_cap={self.depth_cap})"


@dataclass(frozen=True)
class Tower:
    """Increasing finite-index extensions H_1 = Z^d <= ... with duals G_n = H_n*."""

    levels: tuple
    duals: tuple

    @property
    def depth(self) -> int:
        return len(self.levels)

    def index_at(self, n: int) -> int:
        """[Z^d : G_n] = [H_n : Z^d] at 1-based level n."""
        return int(index(self.duals[n - 1], Lattice.standard(self.duals[n - 1].d)))


# ---------------------------------------------------------------------------
# operations


def canonicalize(h: HGroup) -> HGroup:
    """Rebuild the canonical form (idempotent; trivial entries dropped)."""
    _require_local(h)
    return HGroup.from_local_data(h.d, h.local_data())


def member_h(v, h) -> bool:
    """Membership of a rational vector in H."""
    v = tuple(Fraction(x) for x in v)
    if len(v) != h.d:
        raise ValueError("dimension mismatch")
    if isinstance(h, ProgramGroup):
        return _member_program(v, h)
    for p in sorted(denominator_primes(v)):
        entry = h.entry(p)
        if entry is None or not entry.member_local(v):
            return False
    return True


def _member_program(v, h: ProgramGroup) -> bool:
    primes = denominator_primes(v)
    if not primes:
        return True
    known = h.level_primes(h.depth_cap)
    if not primes.issubset(known):
        raise DepthExceededError(
            f"denominator primes {sorted(primes - known)} not resolvable at depth {h.depth_cap}"
        )
    # determinants are pairwise coprime, so deeper levels only add new
    # denominator primes: membership is decided at the deepest level
    return h.level(h.depth_cap).member(v)


def equal_h(h1, h2) -> bool:
    """H = H' for LOCAL presentations: equal divisible subspaces and mutual
    membership of the lattice-part generators at every support prime."""
    _require_local(h1)
    _require_local(h2)
    if h1.d != h2.d:
        return False
    if h1.support() != h2.support():
        return False
    for e1 in h1.entries:
        e2 = h2.entry(e1.p)
        if e1.vspan != e2.vspan:  # canonical subspace bases are syntactic
            return False
        if not all(e2.member_local(c) for c in e1.lattice.basis_columns()):
            return False
        if not all(e1.member_local(c) for c in e2.lattice.basis_columns()):
            return False
    return True


def superindex(h) -> Supernatural:
    """Superindex of Z^d in H as a supernatural number."""
    return superindex_info(h)[0]


def superindex_info(h):
    """(superindex, exact) - exact is False for PROGRAM kind (depth-capped)."""
    if isinstance(h, ProgramGroup):
        exps: dict[int, object] = {}
        for n in range(1, h.depth_cap + 1):
            idx = int(index(h.level_dual(n), Lattice.standard(h.d)))
            for p, e in factorint(idx).items():
                exps[p] = max(exps.get(p, 0), e)
        return Supernatural(exps), False
    exps = {}
    for e in h.entries:
        exps[e.p] = INF if e.r > 0 else e.index_valuation()
    return Supernatural(exps), True


def is_free(h: HGroup) -> bool:
    """Free action iff the divisible subspaces together span Q^d (H dense)."""
    _require_local(h)
    vecs = [w for e in h.entries for w in e.vspan]
    return len(subspace_basis(vecs, h.d)) == h.d


def apply_matrix(a: Mat, h: HGroup) -> HGroup:
    """Presentation of a.H; raises NotSupergroupError if Z^d is not contained."""
    _require_local(h)
    if a.d != h.d:
        raise ValueError("dimension mismatch")
    det = a.det()
    if det == 0:
        raise SingularMatrixError("matrix must be invertible")
    primes = set(h.support())
    for row in a.rows:
        primes |= denominator_primes(row)
    primes |= set(factorint(det.numerator))
    primes |= set(factorint(det.denominator))
    ainv = a.inv()
    data = {}
    for p in sorted(primes):
        entry = h.entry(p)
        for i in range(h.d):
            pre = ainv.col(i)  # preimage of e_i
            ok = entry.member_local(pre) if entry else all(
                x.denominator % p != 0 for x in pre
            )
            if not ok:
                raise NotSupergroupError(
                    f"image group does not contain Z^{h.d} locally at {p}"
                )
        lat_cols = entry.lattice.basis_columns() if entry else Mat.identity(h.d).columns()
        div = entry.vspan if entry else ()
        data[p] = ([a.apply(c) for c in lat_cols], [a.apply(w) for w in div])
    return HGroup.from_local_data(h.d, data)


def tower(h, depth: int, moduli=None) -> Tower:
    """Approximating tower with levels H_n = H n (1/N_n) Z^d.

    The default chain takes N_n = n!; a custom chain of moduli may be
    supplied instead (N_1 = 1 and N_n | N_{n+1}, so levels increase).
    PROGRAM presentations use their own built-in chain.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(h, ProgramGroup):
        if moduli is not None:
            raise UnsupportedPresentationError("PROGRAM kind has a built-in chain")
        levels = tuple(h.level(n) for n in range(depth))
        return Tower(levels, tuple(l.dual() for l in levels))
    _require_local(h)
    if moduli is None:
        moduli = [factorial(n) for n in range(1, depth + 1)]
    else:
        moduli = [int(n) for n in moduli]
        if len(moduli) < depth or moduli[0] != 1:
            raise ValueError("chain must start at 1 and cover the depth")
        if any(moduli[k + 1] % moduli[k] for k in range(depth - 1)):
            raise ValueError("each chain modulus must divide the next")
    zd = Lattice.standard(h.d)
    levels = []
    for n in range(1, depth + 1):
        fact = moduli[n - 1]
        parts = [zd]
        for e in h.entries:
            k = valuation(fact, e.p) if fact % e.p == 0 else 0
            if k == 0:
                continue
            pk = Fraction(1, e.p**k)
            cols = list(e.lattice.basis_columns())
            if e.r > 0:
                m = max(k, valuation(e.lattice.den, e.p) if e.lattice.den > 1 else 0)
                pm = Fraction(1, e.p**m)
                cols += [tuple(pm * x for x in w) for w in e._sat]
            enlarged = Lattice.from_span(h.d, cols)
            parts.append(lattice_intersect(enlarged, lattice_scale(zd, pk)))
        levels.append(lattice_sum(*parts))
    return Tower(tuple(levels), tuple(l.dual() for l in levels))


def direct_sum(h1: HGroup, h2: HGroup) -> HGroup:
    """Block presentation of H1 + H2 in dimension d1 + d2."""
    _require_local(h1)
    _require_local(h2)
    d1, d2 = h1.d, h2.d
    d = d1 + d2

    def up(v):
        return tuple(v) + (Fraction(0),) * d2

    def down(v):
        return (Fraction(0),) * d1 + tuple(v)

    data = {}
    for p in sorted(set(h1.support()) | set(h2.support())):
        lat_gens, div_gens = [], []
        e1, e2 = h1.entry(p), h2.entry(p)
        if e1 is not None:
            lat_gens += [up(c) for c in e1.lattice.basis_columns()]
            div_gens += [up(w) for w in e1.vspan]
        if e2 is not None:
            lat_gens += [down(c) for c in e2.lattice.basis_columns()]
            div_gens += [down(w) for w in e2.vspan]
        data[p] = (lat_gens, div_gens)
    return HGroup.from_local_data(d, data)


def superindex_oracle(h, depth: int) -> dict[int, int]:
    """Union-of-divisors reading of the superindex from a finite tower:
    for each prime, the largest exponent dividing some level index."""
    t = tower(h, depth)
    exps: dict[int, int] = {}
    for n in range(1, t.depth + 1):
        idx = t.index_at(n)
        if idx == 1:
            continue
        for p, e in factorint(idx).items():
            exps[p] = max(exps.get(p, 0), e)
    return exps


def _require_local(h):
    if not isinstance(h, HGroup):
        raise UnsupportedPresentationError(
            f"operation requires a LOCAL presentation, got {type(h).__name__}"
        )
