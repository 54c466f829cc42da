"""Finite permutation groups: enumeration, subgroup machinery, pair classes.

A group is the closure of its generators under composition, enumerated once
at construction and sorted by image tuple, so element indices are stable and
every downstream ordering (subgroup keys, class indices) is reproducible.
All values are immutable after construction.
"""

from __future__ import annotations

import logging
import os
import re
from dataclasses import dataclass
from math import gcd

from .perms import (
    PermError,
    conjugate,
    format_perm,
    identity,
    inverse,
    mult,
    pad,
    parse_generators,
    perm_order,
)

__all__ = [
    "GroupError",
    "PermutationGroup",
    "Subgroup",
    "PairClass",
    "PairSystem",
    "DirectProduct",
    "subgroups_between",
    "direct_product",
    "catalog_group",
    "parse_group",
]

logger = logging.getLogger("burnside.groups")

DEFAULT_ELEMENT_CAP = 10**6

# Full |S|^2 closure re-verification on every Subgroup when set (test builds).
VERIFY_SUBGROUPS = bool(os.environ.get("BURNSIDE_VERIFY_SUBGROUPS"))


class GroupError(ValueError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class PermutationGroup:
    """A finite permutation group on the points 1..degree."""

    def __init__(self, degree, generators, name=None, element_cap=DEFAULT_ELEMENT_CAP):
        self.degree = degree
        self.identity = identity(degree)
        gens = []
        for g in generators:
            g = pad(tuple(g), degree)
            if len(g) != degree:
                raise GroupError("generator degree exceeds group degree")
            if g != self.identity and g not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        self.name = name

        elems = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for p in frontier:
                for g in self.generators:
                    q = mult(p, g)
                    if q not in elems:
                        if len(elems) >= element_cap:
                            raise GroupError(
                                f"element cap {element_cap} exceeded during enumeration"
                            )
                        elems.add(q)
                        nxt.append(q)
            frontier = nxt
        self.elements = tuple(sorted(elems))
        self._index = {p: i for i, p in enumerate(self.elements)}
        self.order = len(self.elements)
        self._elem_orders = None
        self._conj_data = None
        self._rep_centralizers = {}
        self._abelian_cache = None
        self._pair_system = None

    def __repr__(self):
        label = self.name or f"degree {self.degree}"
        return f"<PermutationGroup {label}, order {self.order}>"

    def index(self, p) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise GroupError(f"{format_perm(p)} is not an element of this group") from None

    def __contains__(self, p) -> bool:
        return p in self._index

    def element_order(self, i: int) -> int:
        if self._elem_orders is None:
            self._elem_orders = tuple(perm_order(p) for p in self.elements)
        return self._elem_orders[i]

    def exponent(self) -> int:
        e = 1
        for i in range(self.order):
            e = _lcm(e, self.element_order(i))
        return e

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(mult(a, b) == mult(b, a) for a in gens for b in gens)

    # -- conjugacy bookkeeping (element classes with witnesses) --------------

    def _conjugacy(self):
        """For each element index: (class representative index, u) with
        u * rep * u^-1 == element."""
        if self._conj_data is None:
            assign: dict[int, tuple[int, tuple]] = {}
            for i in range(self.order):
                if i in assign:
                    continue
                rep = self.elements[i]
                assign[i] = (i, self.identity)
                frontier = [(rep, self.identity)]
                while frontier:
                    nxt = []
                    for p, u in frontier:
                        for g in self.generators:
                            q = conjugate(g, p)
                            j = self._index[q]
                            if j not in assign:
                                u2 = mult(g, u)
                                assign[j] = (i, u2)
                                nxt.append((q, u2))
                    frontier = nxt
            self._conj_data = assign
        return self._conj_data

    def element_centralizer(self, i: int) -> frozenset[int]:
        """Indices of elements commuting with element i."""
        cached = self._rep_centralizers.get(i)
        if cached is not None:
            return cached
        rep, u = self._conjugacy()[i]
        cent = self._rep_centralizers.get(rep)
        if cent is None:
            p = self.elements[rep]
            cent = frozenset(
                j for j, q in enumerate(self.elements) if mult(p, q) == mult(q, p)
            )
            self._rep_centralizers[rep] = cent
        if rep != i:
            # Z(u x u^-1) = u Z(x) u^-1
            uinv = inverse(u)
            cent = frozenset(
                self._index[mult(mult(u, self.elements[j]), uinv)] for j in cent
            )
            self._rep_centralizers[i] = cent
        return cent

    # -- subgroup construction ------------------------------------------------

    def subgroup(self, generators, name=None) -> "Subgroup":
        gens = [pad(tuple(g), self.degree) for g in generators]
        for g in gens:
            self.index(g)
        elems = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for p in frontier:
                for g in gens:
                    q = mult(p, g)
                    if q not in elems:
                        elems.add(q)
                        nxt.append(q)
            frontier = nxt
        return Subgroup(self, frozenset(elems), tuple(g for g in gens if g != self.identity), name=name)

    def subgroup_from_indices(self, idxset, gen_indices=None, name=None) -> "Subgroup":
        elems = frozenset(self.elements[i] for i in idxset)
        if gen_indices is None:
            gens = self._reduce_generators(idxset)
        else:
            gens = tuple(self.elements[i] for i in gen_indices)
        return Subgroup(self, elems, gens, name=name)

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, frozenset([self.identity]), ())

    def whole_subgroup(self) -> "Subgroup":
        return Subgroup(self, frozenset(self.elements), self.generators, name=self.name)

    def _reduce_generators(self, idxset) -> tuple:
        """Small generating set for the subgroup with the given element indices."""
        gens: list[tuple] = []
        span = {self.identity}
        for i in sorted(idxset):
            p = self.elements[i]
            if p in span:
                continue
            gens.append(p)
            frontier = list(span)
            span.add(p)
            frontier.append(p)
            while frontier:
                nxt = []
                for q in frontier:
                    for g in gens:
                        r = mult(q, g)
                        if r not in span:
                            span.add(r)
                            nxt.append(r)
                frontier = nxt
        return tuple(gens)

    # -- centralizer / normalizer --------------------------------------------

    def centralizer(self, sub: "Subgroup") -> "Subgroup":
        self._check_sub(sub)
        if not sub.generators:
            return self.whole_subgroup()
        idx = None
        for g in sub.generators:
            cg = self.element_centralizer(self._index[g])
            idx = cg if idx is None else (idx & cg)
        return self.subgroup_from_indices(idx)

    def normalizer(self, sub: "Subgroup") -> "Subgroup":
        self._check_sub(sub)
        elems = sub.elements
        gens = sub.generators or (self.identity,)
        keep = [
            i
            for i, p in enumerate(self.elements)
            if all(conjugate(p, h) in elems for h in gens)
        ]
        return self.subgroup_from_indices(keep)

    def center(self) -> "Subgroup":
        return self.centralizer(self.whole_subgroup())

    def _check_sub(self, sub) -> None:
        if sub.parent is not self:
            raise GroupError("subgroup belongs to a different group")

    # -- abelian subgroup enumeration -----------------------------------------

    def abelian_subgroups(self) -> list:
        """Every abelian subgroup (the trivial one included), sorted by
        (order, element key).

        Breadth-first closure: extend each abelian H by x in Z_G(H) \\ H;
        the extension H<x> is again abelian, and induction on generating
        sets shows every abelian subgroup is reached.
        """
        if self._abelian_cache is not None:
            return list(self._abelian_cache)
        ident = self._index[self.identity]
        all_idx = frozenset(range(self.order))
        trivial = frozenset([ident])
        visited = {tuple([ident]): (trivial, ())}
        queue = [(trivial, all_idx, ())]
        powers_cache: dict[int, list[int]] = {}

        def powers(x: int) -> list[int]:
            ps = powers_cache.get(x)
            if ps is None:
                ps = [ident]
                p = self.elements[x]
                q = p
                while q != self.identity:
                    ps.append(self._index[q])
                    q = mult(q, p)
                powers_cache[x] = ps
            return ps

        while queue:
            elems, zset, gens = queue.pop()
            base = [self.elements[i] for i in sorted(elems)]
            for x in sorted(zset - elems):
                xpows = [self.elements[k] for k in powers(x)]
                new = frozenset(
                    self._index[mult(h, xp)] for h in base for xp in xpows
                )
                key = tuple(sorted(new))
                if key in visited:
                    continue
                gens2 = gens + (x,)
                visited[key] = (new, gens2)
                znew = zset & self.element_centralizer(x)
                queue.append((new, znew, gens2))
                if len(visited) % 2000 == 0:
                    logger.info(
                        "abelian subgroup enumeration: %d found", len(visited)
                    )
        subs = [
            self.subgroup_from_indices(idxset, gen_indices=gens)
            for idxset, gens in visited.values()
        ]
        subs.sort(key=lambda s: (s.order, s.key))
        self._abelian_cache = subs
        return list(subs)

    def pair_system(self) -> "PairSystem":
        if self._pair_system is None:
            self._pair_system = PairSystem(self)
        return self._pair_system

    def pair_classes(self) -> list:
        return list(self.pair_system().classes)


class Subgroup:
    """A subgroup of an enumerated ambient group.

    ``key`` is the sorted tuple of parent element indices; it is the canonical
    identity of the subgroup for hashing, ordering, and table lookups.
    """

    __slots__ = ("parent", "elements", "generators", "key", "order", "name")

    def __init__(self, parent, elements: frozenset, generators: tuple, name=None):
        self.parent = parent
        self.elements = elements
        self.generators = tuple(generators)
        self.key = tuple(sorted(parent._index[p] for p in elements))
        self.order = len(elements)
        self.name = name
        if parent.identity not in elements:
            raise GroupError("subgroup must contain the identity")
        if parent.order % self.order:
            raise GroupError("subgroup order must divide the group order")
        for g in self.generators:
            if g not in elements:
                raise GroupError("generator witness outside the subgroup")
        if VERIFY_SUBGROUPS:
            for a in elements:
                for b in elements:
                    if mult(a, b) not in elements:
                        raise GroupError("element set is not closed")

    def __repr__(self):
        label = self.name or f"order {self.order}"
        return f"<Subgroup {label} of {self.parent!r}>"

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.key == other.key
        )

    def __hash__(self):
        return hash((id(self.parent), self.key))

    def __contains__(self, p):
        return p in self.elements

    def sorted_elements(self) -> list:
        return [self.parent.elements[i] for i in self.key]

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(mult(a, b) == mult(b, a) for a in gens for b in gens)

    def is_subset_of(self, other: "Subgroup") -> bool:
        return self.elements <= other.elements

    def exponent(self) -> int:
        e = 1
        for i in self.key:
            e = _lcm(e, self.parent.element_order(i))
        return e

    def conjugate_by(self, g) -> "Subgroup":
        elems = frozenset(conjugate(g, p) for p in self.elements)
        gens = tuple(conjugate(g, p) for p in self.generators)
        return Subgroup(self.parent, elems, gens)

    def is_normal_in(self, other: "Subgroup") -> bool:
        return all(
            conjugate(g, h) in self.elements
            for g in other.generators
            for h in self.elements
        )


# -- subgroups between two nested subgroups ------------------------------------


def _closure_in_table(table, seed, e_id):
    elems = set(seed)
    elems.add(e_id)
    gens = [x for x in seed if x != e_id]
    frontier = list(elems)
    while frontier:
        nxt = []
        for a in frontier:
            row = table[a]
            for g in gens:
                b = row[g]
                if b not in elems:
                    elems.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(elems)


def _all_subgroups_in_table(n, table, e_id):
    """All subgroups of the group given by a full multiplication table."""
    trivial = frozenset([e_id])
    visited = {trivial: ()}
    queue = [(trivial, ())]
    while queue:
        elems, gens = queue.pop()
        for x in range(n):
            if x in elems:
                continue
            new = _closure_in_table(table, elems | {x}, e_id)
            if new not in visited:
                gens2 = gens + (x,)
                visited[new] = gens2
                queue.append((new, gens2))
    return visited


def subgroups_between(bottom: Subgroup, top: Subgroup) -> list:
    """All subgroups Y with bottom <= Y <= top, sorted by (order, key).

    Y need not be abelian.  When bottom is normal in top the enumeration
    runs in the quotient and pulls cosets back; otherwise it extends bottom
    inside top one generator at a time.
    """
    G = bottom.parent
    if bottom.parent is not top.parent:
        raise GroupError("subgroups live in different groups")
    if not bottom.is_subset_of(top):
        raise GroupError("lower subgroup is not contained in the upper one")

    if bottom.is_normal_in(top):
        # coset space of bottom in top with induced multiplication
        elem_list = top.sorted_elements()
        coset_of: dict[tuple, int] = {}
        reps: list[tuple] = []
        for p in elem_list:
            if p in coset_of:
                continue
            cid = len(reps)
            reps.append(p)
            for h in bottom.elements:
                coset_of[mult(h, p)] = cid
        n = len(reps)
        e_id = coset_of[G.identity]
        table = [[coset_of[mult(reps[a], reps[b])] for b in range(n)] for a in range(n)]
        found = _all_subgroups_in_table(n, table, e_id)
        out = []
        for cosets, gens in found.items():
            idxset = {
                G.index(mult(h, reps[c])) for c in cosets for h in bottom.elements
            }
            gen_perms = tuple(bottom.generators) + tuple(reps[c] for c in gens)
            out.append(
                Subgroup(
                    G,
                    frozenset(G.elements[i] for i in idxset),
                    tuple(g for g in gen_perms if g != G.identity),
                )
            )
    else:
        start = frozenset(bottom.key)
        visited = {start: tuple(bottom.generators)}
        queue = [(start, tuple(bottom.generators))]
        top_idx = frozenset(top.key)
        while queue:
            elems, gens = queue.pop()
            base = [G.elements[i] for i in sorted(elems)]
            for x in sorted(top_idx - elems):
                xp = G.elements[x]
                new_gens = tuple(gens) + (xp,)
                span = set(base)
                frontier = list(base)
                while frontier:
                    nxt = []
                    for q in frontier:
                        for g in new_gens:
                            r = mult(q, g)
                            if r not in span:
                                span.add(r)
                                nxt.append(r)
                    frontier = nxt
                new = frozenset(G._index[p] for p in span)
                if new not in visited:
                    visited[new] = new_gens
                    queue.append((new, new_gens))
        out = [
            Subgroup(G, frozenset(G.elements[i] for i in idxset), gens)
            for idxset, gens in visited.items()
        ]
    out.sort(key=lambda s: (s.order, s.key))
    return out


# -- conjugacy classes of pairs (H, Y) ----------------------------------------


@dataclass(frozen=True)
class PairClass:
    """A G-conjugacy class of pairs (H, Y), H abelian nontrivial,
    H <= Y <= Z_G(H), with representative and pair stabilizer attached."""

    index: int
    h: Subgroup
    y: Subgroup
    stabilizer: Subgroup
    orbit_size: int

    def display(self) -> str:
        hname = "<" + ",".join(format_perm(g) for g in self.h.generators) + ">"
        yname = "<" + ",".join(format_perm(g) for g in self.y.generators) + ">"
        return f"[H={hname} (order {self.h.order}), Y={yname} (order {self.y.order})]"


class PairSystem:
    """All pair classes of a group plus lookup tables sending any concrete
    pair (H, Y) to its class index and a conjugator onto the representative."""

    def __init__(self, G: PermutationGroup):
        self.group = G
        abelian = [s for s in G.abelian_subgroups() if s.order > 1]

        # conjugacy classes of abelian subgroups, with witnesses onto the rep
        self._h_lookup: dict[tuple, tuple[int, tuple]] = {}
        h_reps: list[Subgroup] = []
        for sub in abelian:
            if sub.key in self._h_lookup:
                continue
            hid = len(h_reps)
            h_reps.append(sub)
            # orbit BFS: state carries u with u * rep * u^-1 = member
            self._h_lookup[sub.key] = (hid, G.identity)
            frontier = [(sub.elements, G.identity)]
            while frontier:
                nxt = []
                for elems, u in frontier:
                    for g in G.generators:
                        elems2 = frozenset(conjugate(g, p) for p in elems)
                        key2 = tuple(sorted(G._index[p] for p in elems2))
                        if key2 not in self._h_lookup:
                            u2 = mult(g, u)
                            self._h_lookup[key2] = (hid, inverse(u2))
                            nxt.append((elems2, u2))
                frontier = nxt

        # per H-class: Y-orbits under the normalizer, with witnesses
        classes: list[tuple[Subgroup, Subgroup, Subgroup]] = []
        self._y_lookup: list[dict[tuple, tuple[int, tuple]]] = []
        for hid, rep in enumerate(h_reps):
            zc = G.centralizer(rep)
            nr = G.normalizer(rep)
            inters = subgroups_between(rep, zc)
            table: dict[tuple, tuple[int, tuple]] = {}
            self._y_lookup.append(table)
            for y in inters:
                if y.key in table:
                    continue
                cid = len(classes)
                stab_idx = [
                    i
                    for i in nr.key
                    if all(
                        conjugate(G.elements[i], q) in y.elements
                        for q in y.generators or (G.identity,)
                    )
                ]
                stab = G.subgroup_from_indices(frozenset(stab_idx))
                classes.append((rep, y, stab))
                table[y.key] = (cid, G.identity)
                frontier = [(y.elements, G.identity)]
                while frontier:
                    nxt = []
                    for elems, u in frontier:
                        for g in nr.generators:
                            elems2 = frozenset(conjugate(g, p) for p in elems)
                            key2 = tuple(sorted(G._index[p] for p in elems2))
                            if key2 not in table:
                                u2 = mult(g, u)
                                table[key2] = (cid, inverse(u2))
                                nxt.append((elems2, u2))
                    frontier = nxt

        order = sorted(
            range(len(classes)),
            key=lambda c: (
                classes[c][0].order,
                classes[c][0].key,
                classes[c][1].order,
                classes[c][1].key,
            ),
        )
        renumber = {old: new for new, old in enumerate(order)}
        self.classes = [
            PairClass(
                index=renumber[old],
                h=classes[old][0],
                y=classes[old][1],
                stabilizer=classes[old][2],
                orbit_size=G.order // classes[old][2].order,
            )
            for old in order
        ]
        self.classes.sort(key=lambda pc: pc.index)
        for table in self._y_lookup:
            for key in table:
                cid, w = table[key]
                table[key] = (renumber[cid], w)

    def locate(self, h: Subgroup, y: Subgroup) -> tuple[int, tuple]:
        """Class index of the pair plus w with w H w^-1 = repH, w Y w^-1 = repY."""
        G = self.group
        try:
            hid, w1 = self._h_lookup[h.key]
        except KeyError:
            raise GroupError("subgroup is not abelian nontrivial in this group") from None
        ykey = tuple(sorted(G._index[conjugate(w1, p)] for p in y.elements))
        try:
            cid, w2 = self._y_lookup[hid][ykey]
        except KeyError:
            raise GroupError("pair (H, Y) violates H <= Y <= Z_G(H)") from None
        return cid, mult(w2, w1)


# -- direct products -----------------------------------------------------------


@dataclass
class DirectProduct:
    group: PermutationGroup
    left: PermutationGroup
    right: PermutationGroup

    def embed(self, x, y):
        shifted = tuple(self.left.degree + i for i in y)
        return tuple(x) + shifted

    def project(self, p):
        d = self.left.degree
        x = tuple(p[:d])
        y = tuple(p[d + i] - d for i in range(self.right.degree))
        return x, y

    def diagonal(self) -> Subgroup:
        if self.left.elements != self.right.elements:
            raise GroupError("diagonal requires both factors to be the same group")
        elems = frozenset(self.embed(g, g) for g in self.left.elements)
        gens = tuple(self.embed(g, g) for g in self.left.generators)
        return Subgroup(self.group, elems, gens, name="diagonal")


def direct_product(g1: PermutationGroup, g2: PermutationGroup, element_cap=DEFAULT_ELEMENT_CAP) -> DirectProduct:
    """Product acting on the disjoint union of the two point sets."""
    degree = g1.degree + g2.degree
    gens = [pad(g, degree) for g in g1.generators]
    gens += [tuple(range(g1.degree)) + tuple(g1.degree + i for i in g) for g in g2.generators]
    name = None
    if g1.name and g2.name:
        name = f"{g1.name}x{g2.name}"
    P = PermutationGroup(degree, gens, name=name, element_cap=element_cap)
    if P.order != g1.order * g2.order:
        raise GroupError("product enumeration does not match factor orders")
    return DirectProduct(P, g1, g2)


# -- catalog -------------------------------------------------------------------


def _symmetric(n, cap):
    if n < 1:
        raise GroupError("Sn needs n >= 1")
    gens = []
    if n >= 2:
        gens.append((1, 0) + tuple(range(2, n)))
    if n >= 3:
        gens.append(tuple(range(1, n)) + (0,))
    return PermutationGroup(n, gens, name=f"S{n}", element_cap=cap)


def _alternating(n, cap):
    if n < 3:
        if n < 1:
            raise GroupError("An needs n >= 1")
        return PermutationGroup(max(n, 1), [], name=f"A{n}")
    if n == 5:
        # published presentation of A5 by two overlapping 3-cycles
        _, gens = parse_generators("(1,2,3),(3,4,5)")
        return PermutationGroup(5, gens, name="A5", element_cap=cap)
    if n == 6:
        _, gens = parse_generators("(1,2)(3,4,5,6),(1,2,3)")
        return PermutationGroup(6, gens, name="A6", element_cap=cap)
    three = (1, 2, 0) + tuple(range(3, n))
    if n % 2:
        big = tuple(range(1, n)) + (0,)
    else:
        big = (0,) + tuple(range(2, n)) + (1,)
    return PermutationGroup(n, [three, big], name=f"A{n}", element_cap=cap)


def _cyclic(n, cap):
    if n < 1:
        raise GroupError("Cn needs n >= 1")
    if n == 1:
        return PermutationGroup(1, [], name="C1")
    return PermutationGroup(n, [tuple(range(1, n)) + (0,)], name=f"C{n}", element_cap=cap)


def _dihedral(n, cap):
    if n < 3:
        raise GroupError("Dn needs n >= 3 (order 2n, acting on an n-gon)")
    rot = tuple(range(1, n)) + (0,)
    refl = tuple(n - 1 - i for i in range(n))
    G = PermutationGroup(n, [rot, refl], name=f"D{n}", element_cap=cap)
    if G.order != 2 * n:
        raise GroupError("dihedral construction failed")
    return G


def _is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _heisenberg(p, cap):
    if not _is_prime(p) or p == 2:
        raise GroupError("Hep needs an odd prime p")
    # action on F_p x F_p: x: (b,c) -> (b, c-b), y: (b,c) -> (b+1, c)
    pts = p * p

    def pid(b, c):
        return (b % p) * p + (c % p)

    x = tuple(pid(b, c - b) for b in range(p) for c in range(p))
    y = tuple(pid(b + 1, c) for b in range(p) for c in range(p))
    G = PermutationGroup(pts, [x, y], name=f"He{p}", element_cap=cap)
    if G.order != p**3 or G.exponent() != p:
        raise GroupError("Heisenberg construction failed")
    return G


def _elementary(p, r, cap):
    if not _is_prime(p):
        raise GroupError("E(p,r) needs a prime p")
    if r < 1:
        raise GroupError("E(p,r) needs r >= 1")
    gens = []
    for k in range(r):
        base = k * p
        img = list(range(p * r))
        for i in range(p):
            img[base + i] = base + (i + 1) % p
        gens.append(tuple(img))
    return PermutationGroup(p * r, gens, name=f"E({p},{r})", element_cap=cap)


_FIXED_CATALOG = {
    "ASL23": (9, "(2,5,8)(3,9,6),(2,4,3,7)(5,6,9,8),(1,2,3)(4,5,6)(7,8,9)", 216),
    "PSL27": (8, "(3,6,7)(4,5,8),(1,8,2)(4,5,6)", 168),
}

_NAME_RE = re.compile(r"^(S|A|C|D)(\d+)$")
_HE_RE = re.compile(r"^He(\d+)$")
_E_RE = re.compile(r"^E\((\d+),(\d+)\)$")


def _split_product(text):
    parts = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "x" and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def catalog_group(name: str, element_cap=DEFAULT_ELEMENT_CAP) -> PermutationGroup:
    """Group from the catalog grammar: Sn, An, Cn, Dn, Hep, E(p,r), ASL23,
    PSL27, and products joined with x (e.g. C2xS3)."""
    text = name.strip()
    parts = _split_product(text)
    if len(parts) > 1:
        groups = [catalog_group(p, element_cap) for p in parts]
        acc = groups[0]
        for g in groups[1:]:
            acc = direct_product(acc, g, element_cap=element_cap).group
        return acc
    token = parts[0]
    if token in _FIXED_CATALOG:
        degree, gen_text, expect = _FIXED_CATALOG[token]
        _, gens = parse_generators(gen_text, degree=degree)
        G = PermutationGroup(degree, gens, name=token, element_cap=element_cap)
        if G.order != expect:
            raise GroupError(f"{token} construction failed")
        return G
    m = _HE_RE.match(token)
    if m:
        return _heisenberg(int(m.group(1)), element_cap)
    m = _E_RE.match(token)
    if m:
        return _elementary(int(m.group(1)), int(m.group(2)), element_cap)
    m = _NAME_RE.match(token)
    if m:
        family, n = m.group(1), int(m.group(2))
        if family == "S":
            return _symmetric(n, element_cap)
        if family == "A":
            return _alternating(n, element_cap)
        if family == "C":
            return _cyclic(n, element_cap)
        if family == "D":
            return _dihedral(n, element_cap)
    raise GroupError(f"unknown catalog name {name!r}")


def parse_group(text: str, element_cap=DEFAULT_ELEMENT_CAP) -> PermutationGroup:
    """Group from explicit generators in disjoint-cycle notation."""
    try:
        degree, gens = parse_generators(text)
    except PermError as exc:
        raise GroupError(str(exc)) from exc
    return PermutationGroup(degree, gens, element_cap=element_cap)
