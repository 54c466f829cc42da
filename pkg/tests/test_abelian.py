import random
from fractions import Fraction

import pytest

from burnside.abelian import (
    MoebiusTable,
    conjugate_character,
    generates_dual,
    in_cyclic_span,
    moebius,
    restrict_character,
    structure_of,
    subgroup_lattice,
)
from burnside.groups import GroupError, catalog_group, parse_group
from burnside.perms import mult


def whole_structure(name):
    G = catalog_group(name)
    return structure_of(G.whole_subgroup())


def test_structure_examples():
    s4 = catalog_group("S4")
    k4 = s4.subgroup(parse_group("(3,4),(1,2)(3,4)").generators)
    assert structure_of(k4).invariant_factors == (2, 2)
    assert whole_structure("C6").invariant_factors == (6,)
    triv = s4.trivial_subgroup()
    assert structure_of(triv).invariant_factors == ()


def test_structure_rejects_nonabelian():
    s3 = catalog_group("S3")
    with pytest.raises(GroupError):
        structure_of(s3.whole_subgroup())


def test_structure_round_trip_various():
    for name in ["C2", "C12", "E(2,3)", "E(3,2)", "C2xC4", "C2xC6", "C4xC9"]:
        st = whole_structure(name)
        prod = 1
        for d in st.invariant_factors:
            prod *= d
        assert prod == st.order
        for a, b in zip(st.invariant_factors, st.invariant_factors[1:]):
            assert b % a == 0
        for p in st.subgroup.elements:
            assert st.element_of(st.coords(p)) == p


def test_basis_orders_match_invariants():
    st = whole_structure("C2xC6")
    G = st.subgroup.parent
    for b, d in zip(st.basis, st.invariant_factors):
        assert G.element_order(G.index(b)) == d


def test_character_arithmetic():
    st = whole_structure("C3")
    one = st.character((1,))
    two = st.character((2,))
    assert (one + two).is_trivial
    assert (-one) == two
    st22 = whole_structure("E(2,2)")
    assert st22.character((1, 0)).order() == 2
    assert st22.character((0, 0)).order() == 1
    st4 = whole_structure("C4")
    assert st4.character((1,)).order() == 4
    assert st4.character((2,)).order() == 2


def test_character_is_homomorphism():
    rng = random.Random(41)
    for name in ["C6", "E(2,3)", "C2xC4", "E(3,2)"]:
        st = whole_structure(name)
        chars = st.all_characters()
        elems = sorted(st.subgroup.elements)
        E = st.exponent
        for _ in range(60):
            b = rng.choice(chars)
            h1, h2 = rng.choice(elems), rng.choice(elems)
            assert b.residue(mult(h1, h2)) == (b.residue(h1) + b.residue(h2)) % E


def test_restrict_into_kernel_is_trivial():
    st = whole_structure("C6")
    b = st.character((1,))
    ker = b.kernel()
    assert ker.order == 1
    b2 = st.character((2,))
    ker2 = b2.kernel()
    assert ker2.order == 2
    restricted = restrict_character(b2, structure_of(ker2))
    assert restricted.is_trivial


def test_restrict_c6_generator_to_c2():
    G = catalog_group("C6")
    st = structure_of(G.whole_subgroup())
    b = st.character((1,))
    # the subgroup of order 2
    sub = next(s for s in G.abelian_subgroups() if s.order == 2)
    r = restrict_character(b, structure_of(sub))
    assert not r.is_trivial
    assert r.order() == 2


def test_restrict_functorial():
    G = catalog_group("C12")
    st = structure_of(G.whole_subgroup())
    subs = G.abelian_subgroups()
    c4 = next(s for s in subs if s.order == 4)
    c2 = next(s for s in subs if s.order == 2)
    b = st.character((5,))
    via_c4 = restrict_character(restrict_character(b, structure_of(c4)), structure_of(c2))
    direct = restrict_character(b, structure_of(c2))
    assert via_c4 == direct


def test_restriction_preserves_values():
    rng = random.Random(42)
    for name in ["C12", "C2xC6", "E(2,3)"]:
        G = catalog_group(name)
        st = structure_of(G.whole_subgroup())
        chars = st.all_characters()
        for sub in G.abelian_subgroups():
            target = structure_of(sub)
            for _ in range(10):
                b = rng.choice(chars)
                r = restrict_character(b, target)
                for p in sub.elements:
                    assert r.pairing(p) == b.pairing(p)


def test_conjugation_by_centralizer_fixes():
    s3 = catalog_group("S3")
    h = next(s for s in s3.abelian_subgroups() if s.order == 3)
    st = structure_of(h)
    b = st.character((1,))
    for g in h.elements:
        assert conjugate_character(b, g, st) == b


def test_conjugation_inverts_in_s3():
    s3 = catalog_group("S3")
    h = next(s for s in s3.abelian_subgroups() if s.order == 3)
    st = structure_of(h)
    b = st.character((1,))
    transposition = parse_group("(1,2)").generators[0] + (2,)
    bg = conjugate_character(b, transposition, st)
    assert bg == -b


def test_conjugation_is_linear():
    rng = random.Random(43)
    s4 = catalog_group("S4")
    subs = [s for s in s4.abelian_subgroups() if s.order > 1]
    for _ in range(30):
        h = rng.choice(subs)
        st = structure_of(h)
        chars = st.all_characters()
        b1, b2 = rng.choice(chars), rng.choice(chars)
        g = rng.choice(s4.elements)
        target = structure_of(h.conjugate_by(g))
        lhs = conjugate_character(b1 + b2, g, target)
        rhs = conjugate_character(b1, g, target) + conjugate_character(b2, g, target)
        assert lhs == rhs


def test_conjugation_value_identity():
    # b^g(x) = b(g^-1 x g) on every element, for random g
    rng = random.Random(44)
    s4 = catalog_group("S4")
    subs = [s for s in s4.abelian_subgroups() if s.order > 1]
    from burnside.perms import inverse

    for _ in range(30):
        h = rng.choice(subs)
        st = structure_of(h)
        b = rng.choice(st.all_characters())
        g = rng.choice(s4.elements)
        target = structure_of(h.conjugate_by(g))
        bg = conjugate_character(b, g, target)
        for x in target.subgroup.elements:
            assert bg.pairing(x) == b.pairing(mult(mult(inverse(g), x), g))


def test_kernel_examples():
    st = whole_structure("C6")
    assert st.trivial_character().kernel().order == 6
    assert st.character((1,)).kernel().order == 1
    st22 = whole_structure("E(2,2)")
    assert st22.character((1, 0)).kernel().order == 2


def test_generates_dual_examples():
    st3 = whole_structure("C3")
    assert generates_dual([st3.character((1,))], st3)
    st22 = whole_structure("E(2,2)")
    assert not generates_dual([st22.character((1, 0))], st22)
    assert generates_dual(
        [st22.character((1, 0)), st22.character((0, 1))], st22
    )
    triv = structure_of(catalog_group("S3").trivial_subgroup())
    assert generates_dual([], triv)


def test_generates_dual_against_dual_span():
    # independent path: generate the subgroup of the dual directly
    rng = random.Random(45)
    for name in ["C6", "E(2,2)", "C2xC4", "E(3,2)", "C2xC6", "E(2,3)", "C4xC9"]:
        st = whole_structure(name)
        chars = st.all_characters()
        full = len(chars)
        for _ in range(25):
            k = rng.randrange(0, 4)
            beta = [rng.choice(chars) for _ in range(k)]
            span = {st.trivial_character()}
            frontier = list(span)
            while frontier:
                nxt = []
                for c in frontier:
                    for b in beta:
                        d = c + b
                        if d not in span:
                            span.add(d)
                            nxt.append(d)
                frontier = nxt
            assert generates_dual(beta, st) == (len(span) == full)


def test_in_cyclic_span_examples():
    st4 = whole_structure("C4")
    one, two = st4.character((1,)), st4.character((2,))
    assert in_cyclic_span(two, one)
    assert not in_cyclic_span(one, two)
    assert in_cyclic_span(st4.character((0,)), two)


def test_in_cyclic_span_kernel_equivalence():
    # b in <c> iff b restricted to ker(c) is trivial
    rng = random.Random(46)
    for name in ["C6", "E(2,2)", "C2xC4", "E(3,2)", "C12", "C2xC6"]:
        st = whole_structure(name)
        chars = st.all_characters()
        for _ in range(40):
            b, c = rng.choice(chars), rng.choice(chars)
            ker = structure_of(c.kernel())
            expected = restrict_character(b, ker).is_trivial
            assert in_cyclic_span(b, c) == expected


def test_subgroup_lattice_counts():
    G = catalog_group("C12")
    assert len(subgroup_lattice(G.whole_subgroup())) == 6
    G = catalog_group("E(2,2)")
    assert len(subgroup_lattice(G.whole_subgroup())) == 5


def test_moebius_examples():
    c4 = catalog_group("C4")
    t4 = moebius(c4.whole_subgroup())
    subs = t4.subgroups
    assert t4.mu(subs[-1], subs[-1]) == 1
    assert t4.mu(subs[0], subs[-1]) == 0
    v4 = catalog_group("E(2,2)")
    tv = moebius(v4.whole_subgroup())
    assert tv.mu(tv.subgroups[0], tv.subgroups[-1]) == 2
    # chain C2 < C4 contributes -1
    assert t4.mu(subs[1], subs[-1]) == -1


def test_moebius_recursion_identity():
    # sum over A <= C <= B of mu(A, C) is 1 iff A == B else 0
    for name in ["C12", "E(2,3)", "C2xC6", "E(3,2)"]:
        G = catalog_group(name)
        table = moebius(G.whole_subgroup())
        subs = table.subgroups
        for b in subs:
            for a in subs:
                if not a.elements <= b.elements:
                    continue
                total = sum(
                    table.mu(a, c)
                    for c in subs
                    if a.elements <= c.elements and c.elements <= b.elements
                )
                assert total == (1 if a == b else 0)


def weisner_holds(G):
    top = G.whole_subgroup()
    table = moebius(top)
    subs = table.subgroups
    keyset = {s.key: s for s in subs}
    mu_top = {s.key: table.mu(s, top) for s in subs}
    for hp in subs:
        if hp.order == G.order:
            continue  # H' must be proper
        for hpp in subs:
            if not hpp.elements <= hp.elements:
                continue
            total = 0
            for h in subs:
                inter = h.elements & hp.elements
                if len(inter) == hpp.order and inter == hpp.elements:
                    total += mu_top[h.key]
            if total != 0:
                return False
    return True


def test_weisner_small():
    for name in ["C12", "E(2,2)", "E(2,3)", "C2xC6", "E(3,2)", "C4xC4", "C36"]:
        assert weisner_holds(catalog_group(name)), name


def test_double_moebius_small():
    # sum over pairs of subgroups meeting in H'' of mu-products collapses
    for name in ["C12", "E(2,3)", "C2xC6"]:
        G = catalog_group(name)
        table = moebius(G.whole_subgroup())
        subs = table.subgroups
        for h in subs:
            for hp in subs:
                below_h = [s for s in subs if s.elements <= h.elements]
                below_hp = [s for s in subs if s.elements <= hp.elements]
                for hpp in subs:
                    if not (
                        hpp.elements <= h.elements and hpp.elements <= hp.elements
                    ):
                        continue
                    total = 0
                    for a in below_h:
                        ma = table.mu(a, h)
                        if ma == 0:
                            continue
                        for b in below_hp:
                            if a.elements & b.elements == hpp.elements:
                                total += ma * table.mu(b, hp)
                    expected = table.mu(hpp, h) if h == hp else 0
                    assert total == expected


def test_pairing_is_exact_fraction():
    st = whole_structure("C6")
    b = st.character((1,))
    gen = st.basis[0]
    assert b.pairing(gen) == Fraction(1, 6)
