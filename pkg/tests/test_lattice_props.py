"""Lattice-level identities behind the inversion maps: bucketed Moebius
sums, the double-sum corollary, and the inversion identity on the free
module over a subgroup lattice.

The sweeps run over every isomorphism type of abelian group up to a size
cap, assembled as products of cyclic groups of prime power order.
"""

import random
from functools import lru_cache

import pytest

from burnside.abelian import (
    MoebiusTable,
    generates_dual,
    in_cyclic_span,
    restrict_character,
    structure_of,
)
from burnside.groups import catalog_group
from burnside.perms import mult


def partitions(n):
    if n == 0:
        yield ()
        return
    for first in range(n, 0, -1):
        for rest in partitions(n - first):
            if not rest or rest[0] <= first:
                yield (first,) + rest


def _factor(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def abelian_type_names(max_order):
    """Catalog names of all abelian isomorphism types of order 2..max_order."""
    names = []
    for order in range(2, max_order + 1):
        per_prime = [
            [tuple(p**k for k in part) for part in partitions(e)]
            for p, e in sorted(_factor(order).items())
        ]
        combos = [()]
        for options in per_prime:
            combos = [c + (o,) for c in combos for o in options]
        for combo in combos:
            factors = [q for group in combo for q in group]
            names.append(("x".join(f"C{q}" for q in sorted(factors)), order))
    return names


def test_abelian_type_counts():
    names = abelian_type_names(64)
    by_order = {}
    for _, order in names:
        by_order[order] = by_order.get(order, 0) + 1
    assert by_order[16] == 5
    assert by_order[36] == 4
    assert by_order[64] == 11
    assert len({n for n, _ in names}) == len(names)


def lattice_masks(G):
    """Subgroup lattice of the whole group with element-index bitmasks."""
    top = G.subgroup(G.generators)
    tab = MoebiusTable(top)
    masks = []
    for s in tab.subgroups:
        m = 0
        for p in s.elements:
            m |= 1 << G.index(p)
        masks.append(m)
    return top, tab, masks


def mu_dense(tab):
    n = len(tab.subgroups)
    keysets = [frozenset(s.key) for s in tab.subgroups]
    dense = [[0] * n for _ in range(n)]
    for b in range(n):
        for a in range(n):
            if keysets[a] <= keysets[b]:
                dense[a][b] = tab.mu(tab.subgroups[a], tab.subgroups[b])
    return dense


WEISNER_FAST = [n for n, order in abelian_type_names(36)]
WEISNER_SLOW = [n for n, order in abelian_type_names(64) if order > 36]


def run_weisner(name):
    # for fixed proper H' every intersection bucket of mu(. , G) sums to 0
    G = catalog_group(name)
    top, tab, masks = lattice_masks(G)
    n = len(tab.subgroups)
    pos = {m: i for i, m in enumerate(masks)}
    full = masks[pos[max(masks, key=int.bit_count)]]
    assert full == masks[-1]
    mu_top = [tab.mu(s, top) for s in tab.subgroups]
    for hp in range(n):
        if masks[hp] == full:
            continue
        buckets = {}
        mp = masks[hp]
        for h in range(n):
            inter = masks[h] & mp
            buckets[inter] = buckets.get(inter, 0) + mu_top[h]
        assert all(v == 0 for v in buckets.values()), (name, hp, buckets)


@pytest.mark.parametrize("name", WEISNER_FAST)
def test_weisner_buckets_vanish(name):
    run_weisner(name)


@pytest.mark.slow
@pytest.mark.parametrize("name", WEISNER_SLOW)
def test_weisner_buckets_vanish_large(name):
    run_weisner(name)


DOUBLE_FAST = [n for n, order in abelian_type_names(16)]
DOUBLE_SLOW = [n for n, order in abelian_type_names(36) if order > 16]


def run_double_moebius(name):
    # summing mu against mu over pairs with a fixed intersection collapses
    # to a single mu value on the diagonal and to zero off it
    G = catalog_group(name)
    top, tab, masks = lattice_masks(G)
    n = len(tab.subgroups)
    pos = {m: i for i, m in enumerate(masks)}
    keysets = [frozenset(s.key) for s in tab.subgroups]
    below = [[a for a in range(n) if keysets[a] <= keysets[b]] for b in range(n)]
    dense = mu_dense(tab)
    for h in range(n):
        for hp in range(n):
            buckets = {}
            for a in below[h]:
                ma = masks[a]
                mu_a = dense[a][h]
                if mu_a == 0:
                    continue
                for b in below[hp]:
                    w = mu_a * dense[b][hp]
                    if w == 0:
                        continue
                    inter = ma & masks[b]
                    buckets[inter] = buckets.get(inter, 0) + w
            for inter, value in buckets.items():
                expected = dense[pos[inter]][h] if h == hp else 0
                assert value == expected, (name, h, hp)
            if h == hp:
                # buckets that never appear correspond to mu = 0
                for a in below[h]:
                    if masks[a] not in buckets:
                        assert dense[a][h] == 0


@pytest.mark.parametrize("name", DOUBLE_FAST)
def test_double_moebius_collapse(name):
    run_double_moebius(name)


@pytest.mark.slow
@pytest.mark.parametrize("name", DOUBLE_SLOW)
def test_double_moebius_collapse_large(name):
    run_double_moebius(name)


PSIPHI_FAST = [n for n, order in abelian_type_names(36)]
PSIPHI_SLOW = [n for n, order in abelian_type_names(64) if order > 36]


def run_lattice_inversion(name):
    # on the free module over the lattice, summing over subgroups and the
    # mu-weighted sum invert each other
    G = catalog_group(name)
    top, tab, masks = lattice_masks(G)
    n = len(tab.subgroups)
    keysets = [frozenset(s.key) for s in tab.subgroups]
    below = [[a for a in range(n) if keysets[a] <= keysets[b]] for b in range(n)]
    below_sets = [set(lst) for lst in below]
    dense = mu_dense(tab)
    for s in range(n):
        # phi then psi
        acc = {}
        for t in below[s]:
            w = dense[t][s]
            if w == 0:
                continue
            for u in below[t]:
                acc[u] = acc.get(u, 0) + w
        acc = {u: v for u, v in acc.items() if v}
        assert acc == {s: 1}, (name, s)
        # psi then phi
        acc = {}
        for t in below[s]:
            for u in below[t]:
                acc[u] = acc.get(u, 0) + dense[u][t]
        acc = {u: v for u, v in acc.items() if v}
        assert acc == {s: 1}, (name, s)


@pytest.mark.parametrize("name", PSIPHI_FAST)
def test_lattice_inversion_identity(name):
    run_lattice_inversion(name)


@pytest.mark.slow
@pytest.mark.parametrize("name", PSIPHI_SLOW)
def test_lattice_inversion_identity_large(name):
    run_lattice_inversion(name)


# -- character-level brute force checks -----------------------------------------------


SPAN_GROUPS = ["C6", "C12", "E(2,2)", "C2xC4", "E(3,3)", "C2xC18"]


@pytest.mark.parametrize("name", SPAN_GROUPS)
def test_cyclic_span_matches_brute_force(name):
    G = catalog_group(name)
    st = structure_of(G.subgroup(G.generators))
    chars = st.all_characters()
    q = st.invariant_factors
    for c in chars:
        multiples = set()
        cur = tuple([0] * len(q))
        while cur not in multiples:
            multiples.add(cur)
            cur = tuple((x + y) % m for x, y, m in zip(cur, c.coords, q))
        for b in chars:
            assert in_cyclic_span(b, c) == (tuple(b.coords) in multiples), (
                name,
                b.coords,
                c.coords,
            )


@pytest.mark.parametrize("name", SPAN_GROUPS)
def test_cyclic_span_kernel_duality(name):
    # b is a power of c exactly when b dies on the kernel of c
    G = catalog_group(name)
    st = structure_of(G.subgroup(G.generators))
    chars = st.all_characters()
    for c in chars:
        ker = structure_of(c.kernel())
        for b in chars:
            dies = restrict_character(b, ker).is_trivial
            assert in_cyclic_span(b, c) == dies, (name, b.coords, c.coords)


@pytest.mark.parametrize("name", SPAN_GROUPS)
def test_generates_dual_matches_brute_force(name):
    G = catalog_group(name)
    st = structure_of(G.subgroup(G.generators))
    all_coords = [tuple(c.coords) for c in st.all_characters()]
    q = st.invariant_factors
    order = st.subgroup.order
    rng = random.Random(hash(name) & 0xFFFF)

    def brute(coords_list):
        span = {tuple([0] * len(q))}
        frontier = list(span)
        while frontier:
            nxt = []
            for v in frontier:
                for c in coords_list:
                    w = tuple((x + y) % m for x, y, m in zip(v, c, q))
                    if w not in span:
                        span.add(w)
                        nxt.append(w)
            frontier = nxt
        return len(span) == order

    picks = [(c,) for c in all_coords]
    picks += [tuple(rng.sample(all_coords, 2)) for _ in range(30)]
    picks += [tuple(rng.sample(all_coords, 3)) for _ in range(30)]
    for coords_list in picks:
        chars = [st.character(c) for c in coords_list]
        assert generates_dual(chars, st) == brute(coords_list), (name, coords_list)


@pytest.mark.parametrize("name", ["C6", "C2xC4", "E(3,3)", "C12"])
def test_character_values_are_homomorphisms(name):
    G = catalog_group(name)
    st = structure_of(G.subgroup(G.generators))
    E = st.exponent
    elems = st.subgroup.sorted_elements()
    for b in st.all_characters():
        for h in elems:
            for hp in elems:
                assert b.residue(mult(h, hp)) == (b.residue(h) + b.residue(hp)) % E
