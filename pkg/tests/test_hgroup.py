import random
from fractions import Fraction
from math import factorial

import pytest

from zodom.gdsl import parse_group
from zodom.hgroup import (
    DepthExceededError,
    HGroup,
    ProgramGroup,
    UnsupportedPresentationError,
    apply_matrix,
    canonicalize,
    direct_sum,
    equal_h,
    is_free,
    member_h,
    superindex,
    superindex_info,
    superindex_oracle,
    tower,
)
from zodom.linalg import (
    INF,
    Lattice,
    Mat,
    Supernatural,
    index,
    member,
    subspace_basis,
    valuation,
)

F = Fraction

Z2_3 = "oplus(Z[1/2], Z[1/3])"
FUCHS = "oplus(Z[1/2], Z[1/3]) + gen(1/5, 1/5)"

GALLERY = [
    "oplus(Z)",
    "oplus(Z[1/2])",
    "oplus(Z[1/6])",
    "oplus(Z, Z)",
    Z2_3,
    "oplus(Z[1/3], Z[1/2])",
    "oplus(Z[1/2], Z[1/15])",
    "oplus(Z[1/10], Z[1/3])",
    FUCHS,
    "oplus(Z[1/2]) + gen(1/5)",
]


# ---------------------------------------------------------------------------
# canonicalize


def test_canonicalize_split_group():
    h = parse_group(Z2_3)
    assert h.support() == (2, 3)
    e2, e3 = h.entries
    assert (e2.r, e3.r) == (1, 1)
    assert e2.vspan == ((1, 0),)
    assert e3.vspan == ((0, 1),)
    assert e2.lattice == Lattice.standard(2)


def test_canonicalize_trivial_group():
    h = parse_group("oplus(Z, Z)")
    assert h.support() == ()
    assert canonicalize(h) == h


def test_canonicalize_fuchs_adds_five_entry():
    h = parse_group(FUCHS)
    e5 = h.entry(5)
    assert e5.r == 0
    assert e5.lattice == Lattice.from_span(2, [(F(1, 5), F(1, 5)), (0, 1)])


def test_canonicalize_idempotent_on_gallery():
    for text in GALLERY:
        h = parse_group(text)
        assert canonicalize(h) == h


def test_composite_support_key_rejected():
    with pytest.raises(ValueError):
        HGroup.from_local_data(1, {6: ([(F(1, 6),)], [])})


# ---------------------------------------------------------------------------
# membership


def test_member_fuchs_examples():
    h = parse_group(FUCHS)
    assert member_h((F(1, 5), F(1, 5)), h)
    assert not member_h((F(1, 5), 0), h)
    assert member_h((0, 0), h)
    assert member_h((F(3, 4), F(2, 9)), h)
    assert not member_h((F(1, 7), 0), h)
    assert member_h((F(2, 5), F(7, 5)), h)  # 2*(1/5,1/5) + (0,1)
    assert not member_h((F(2, 5), F(1, 5)), h)


def test_member_degenerate_standard():
    h = HGroup.standard(2)
    assert member_h((1, -3), h)
    assert not member_h((F(1, 2), 0), h)


# ---------------------------------------------------------------------------
# equality


def test_equal_examples():
    a = parse_group(Z2_3)
    b = parse_group("oplus(Z[1/3], Z[1/2])")
    assert equal_h(a, a)
    assert not equal_h(a, b)
    assert not equal_h(parse_group(FUCHS), a)


def test_equal_is_equivalence_on_presentation_variants():
    # same group built three different ways
    a = parse_group("oplus(Z[1/2], Z[1/3])")
    b = direct_sum(parse_group("oplus(Z[1/2])"), parse_group("oplus(Z[1/3])"))
    c = parse_group("oplus(Z[1/2], Z) + oplus(Z, Z[1/3])")
    assert equal_h(a, b) and equal_h(b, c) and equal_h(a, c)
    assert equal_h(b, a) and equal_h(c, b)


def test_equal_rejects_program_kind():
    prog = ProgramGroup(2, lambda n: Mat([[3, 1], [1, 4]]), 3)
    with pytest.raises(UnsupportedPresentationError):
        equal_h(prog, parse_group(Z2_3))


# ---------------------------------------------------------------------------
# superindex


def test_superindex_examples():
    assert superindex(parse_group("oplus(Z[1/2], Z[1/15])")) == Supernatural(
        {2: INF, 3: INF, 5: INF}
    )
    assert superindex(HGroup.standard(2)) == Supernatural({})
    assert superindex(parse_group(FUCHS)) == Supernatural({2: INF, 3: INF, 5: 1})


def test_superindex_of_direct_sum_adds_exponents():
    a = parse_group("oplus(Z[1/2]) + gen(1/9)")
    b = parse_group("oplus(Z[1/3]) + gen(1/2)")
    sa, sb = superindex(a), superindex(b)
    s = superindex(direct_sum(a, b))
    for p in (2, 3):
        assert s.exponent(p) == sa.exponent(p) + sb.exponent(p)
    assert s.exponent(2) == INF and s.exponent(3) == INF


def test_superindex_matches_tower_oracle_on_gallery():
    for text in GALLERY:
        h = parse_group(text)
        s = superindex(h)
        oracle = superindex_oracle(h, 6)
        for p in set(s.primes()) | set(oracle):
            e = s.exponent(p)
            if e == INF:
                # exponent grows with the (1/n!)-chain: r_p divisible
                # directions each contribute v_p(n!) at depth n
                r = h.entry(p).r
                lat = h.entry(p).index_valuation()
                assert oracle[p] == r * valuation(factorial(6), p) + lat
            else:
                assert oracle.get(p, 0) == e


# ---------------------------------------------------------------------------
# freeness


def test_is_free_examples():
    assert is_free(parse_group(Z2_3))
    assert not is_free(parse_group("oplus(Z[1/2], Z)"))
    assert is_free(parse_group("oplus(Z[1/2])"))
    assert not is_free(HGroup.standard(2))
    assert is_free(parse_group(FUCHS))


# ---------------------------------------------------------------------------
# matrix action


def test_apply_matrix_swap_example():
    swap = Mat([[0, 1], [1, 0]])
    assert equal_h(
        apply_matrix(swap, parse_group(Z2_3)), parse_group("oplus(Z[1/3], Z[1/2])")
    )


def test_apply_matrix_identity():
    h = parse_group(FUCHS)
    assert equal_h(apply_matrix(Mat.identity(2), h), h)


def test_apply_matrix_rational_scaling_example():
    a = Mat([[F(1, 5), 0], [0, 5]])
    h = parse_group("oplus(Z[1/2], Z) + oplus(Z, Z[1/3]) + gen(0, 1/5)")
    hp = parse_group("oplus(Z[1/2], Z) + oplus(Z, Z[1/3]) + gen(1/5, 0)")
    assert equal_h(apply_matrix(a, h), hp)


def test_apply_matrix_roundtrip_random_unimodular():
    rng = random.Random(2024)
    h = parse_group(FUCHS)
    count = 0
    while count < 50:
        rows = [[rng.randint(-4, 4) for _ in range(2)] for _ in range(2)]
        det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        if abs(det) != 1:
            continue
        count += 1
        a = Mat(rows)
        assert equal_h(apply_matrix(a, apply_matrix(a.inv(), h)), h)


# ---------------------------------------------------------------------------
# towers


def test_tower_examples():
    t = tower(parse_group("oplus(Z[1/2])"), 3)
    assert t.levels[0] == Lattice.standard(1)
    assert t.levels[1] == Lattice.from_span(1, [(F(1, 2),)])
    assert t.duals[1] == Lattice.from_span(1, [(2,)])

    t = tower(HGroup.standard(2), 4)
    assert all(l == Lattice.standard(2) for l in t.levels)

    t = tower(parse_group(Z2_3), 2)
    assert t.levels[1] == Lattice.from_span(2, [(F(1, 2), 0), (0, 1)])
    assert t.duals[1] == Lattice.from_span(2, [(2, 0), (0, 1)])


def test_tower_custom_chain():
    h = parse_group(Z2_3)
    t = tower(h, 3, moduli=[1, 6, 36])
    assert t.levels[0] == Lattice.standard(2)
    assert t.levels[1] == Lattice.from_span(2, [(F(1, 2), 0), (0, F(1, 3))])
    assert t.index_at(3) == 36
    with pytest.raises(ValueError):
        tower(h, 3, moduli=[1, 6, 8])  # 6 does not divide 8
    with pytest.raises(ValueError):
        tower(h, 2, moduli=[2, 4])  # must start at 1


def test_tower_invariants():
    for text in (Z2_3, FUCHS, "oplus(Z[1/10], Z[1/3])"):
        h = parse_group(text)
        t = tower(h, 6)
        zd = Lattice.standard(h.d)
        for n in range(t.depth):
            assert t.duals[n].is_integral()
            assert zd.contains(t.duals[n])
            if n > 0:
                assert t.levels[n].contains(t.levels[n - 1])
                assert t.duals[n - 1].contains(t.duals[n])
            # index duality [Z^d : G_n] = [H_n : Z^d]
            assert index(t.duals[n], zd) == index(zd, t.levels[n])


def test_tower_levels_capture_membership():
    rng = random.Random(99)
    h = parse_group(FUCHS)
    t = tower(h, 6)
    for _ in range(60):
        v = (
            F(rng.randint(-20, 20), rng.choice([1, 2, 4, 3, 5, 6, 30])),
            F(rng.randint(-20, 20), rng.choice([1, 2, 4, 3, 5, 6, 30])),
        )
        in_level = any(member(v, lvl) for lvl in t.levels)
        if in_level:
            assert member_h(v, h)
        denom_lcm = (v[0].denominator * v[1].denominator)
        if member_h(v, h) and denom_lcm <= 30:  # 30 | 6! guarantees capture by depth 6
            assert any(member(v, lvl) for lvl in t.levels)


# ---------------------------------------------------------------------------
# direct sums


def test_direct_sum_examples():
    s = direct_sum(parse_group("oplus(Z[1/2])"), parse_group("oplus(Z[1/3])"))
    assert equal_h(s, parse_group(Z2_3))
    assert direct_sum(HGroup.standard(1), HGroup.standard(1)) == HGroup.standard(2)
    dd = direct_sum(parse_group("oplus(Z[1/2])"), parse_group("oplus(Z[1/2])"))
    assert dd.entry(2).r == 2
    assert subspace_basis(dd.entry(2).vspan, 2) == ((1, 0), (0, 1))


# ---------------------------------------------------------------------------
# PROGRAM kind


def _prog():
    mats = {1: Mat([[3, 1], [1, 4]]), 2: Mat([[10, 1], [1, 11]])}
    return ProgramGroup(2, lambda n: mats[n], 2)


def test_program_levels_and_membership():
    prog = _prog()
    assert prog.level(0) == Lattice.standard(2)
    lvl1 = prog.level(1)
    assert int(index(Lattice.standard(2), lvl1)) == 11
    # rows of alpha^-1 are in H_1 (row convention)
    inv = Mat([[3, 1], [1, 4]]).inv()
    for i in range(2):
        row = tuple(inv.rows[i])
        assert member_h(row, prog)
    assert member_h((1, 0), prog)
    assert not member_h((F(1, 11), 0), prog)
    with pytest.raises(DepthExceededError):
        member_h((F(1, 7), 0), prog)  # 7 is not a level determinant prime


def test_program_rejects_non_coprime_determinants():
    # repeating the same multiplier repeats its determinant 11
    prog = ProgramGroup(2, lambda n: Mat([[3, 1], [1, 4]]), 3)
    prog.level(1)
    with pytest.raises(ValueError):
        prog.level(2)


def test_program_superindex_partial():
    s, exact = superindex_info(_prog())
    assert not exact
    assert s == Supernatural({11: 1, 109: 1})
    assert superindex_info(parse_group(Z2_3))[1]


def test_program_tower():
    t = tower(_prog(), 3)
    assert t.levels[0] == Lattice.standard(2)
    assert t.index_at(2) == 11
    assert t.index_at(3) == 11 * 109
    assert t.levels[2].contains(t.levels[1])
