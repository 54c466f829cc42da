"""Finite abelian subgroups: invariant factors, characters, Moebius tables.

Characters are residue vectors against the canonical invariant-factor basis,
never complex roots of unity, so every comparison is exact.  A character b of
H with coordinates (c_1, ..., c_k) takes the value b(h) = sum c_j y_j E/d_j
mod E on the element with coordinates y, where E = exp(H).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .groups import GroupError, Subgroup, subgroups_between
from .perms import inverse, mult
from .zlattice import IntMatrix, smith_normal_form

__all__ = [
    "AbelianStructure",
    "Character",
    "MoebiusTable",
    "structure_of",
    "restrict_character",
    "conjugate_character",
    "generates_dual",
    "in_cyclic_span",
    "subgroup_lattice",
    "moebius",
]

# Re-check transported characters value-by-value when set (test builds).
VERIFY_CHARACTERS = bool(os.environ.get("BURNSIDE_VERIFY_CHARACTERS"))


def _lcm(a, b):
    return a * b // gcd(a, b)


class AbelianStructure:
    """Invariant-factor presentation of an abelian subgroup.

    ``basis`` lists elements b_1, ..., b_k of orders d_1 | d_2 | ... | d_k
    with H = <b_1> x ... x <b_k>; ``coords`` and ``element_of`` convert both
    ways and are verified by a full round trip at construction.
    """

    def __init__(self, sub: Subgroup):
        if not sub.is_abelian():
            raise GroupError("abelian structure requires an abelian subgroup")
        self.subgroup = sub
        parent = sub.parent
        gens = list(sub.generators)
        t = len(gens)
        if t == 0:
            self.invariant_factors = ()
            self.basis = ()
            self.exponent = 1
            self._coord_map = {parent.identity: ()}
            return

        # word vectors: φ: Z^t -> H, e_i -> gens[i]; BFS over the Cayley graph
        words = {parent.identity: (0,) * t}
        frontier = [parent.identity]
        relations = []
        while frontier:
            nxt = []
            for p in frontier:
                w = words[p]
                for i, g in enumerate(gens):
                    q = mult(p, g)
                    w2 = list(w)
                    w2[i] += 1
                    if q in words:
                        # cycle in the Cayley graph: a relation of H
                        rel = tuple(a - b for a, b in zip(w2, words[q]))
                        if any(rel):
                            relations.append({j: v for j, v in enumerate(rel) if v})
                    else:
                        words[q] = tuple(w2)
                        nxt.append(q)
            frontier = nxt
        if len(words) != sub.order:
            raise GroupError("generator witnesses do not generate the subgroup")

        res = smith_normal_form(IntMatrix(relations, t))
        diag = res.diag
        # H finite forces full rank; the product check certifies completeness
        # of the Cayley relations (|Z^t / L| >= |H| with equality iff L = ker φ)
        if len(diag) != t:
            raise GroupError("relation lattice of a finite group must have full rank")
        prod = 1
        for d in diag:
            prod *= d
        if prod != sub.order:
            raise GroupError("relation lattice does not present the subgroup")

        keep = [j for j in range(t) if diag[j] > 1]
        self.invariant_factors = tuple(diag[j] for j in keep)
        self.exponent = self.invariant_factors[-1] if keep else 1

        def phi(vec):
            p = parent.identity
            for i, g in enumerate(gens):
                k = vec[i] % perm_order_cached(parent, g)
                for _ in range(k):
                    p = mult(p, g)
            return p

        self.basis = tuple(phi(res.vinv[j]) for j in keep)

        V = res.v
        self._coord_map = {}
        for p, w in words.items():
            full = [sum(w[i] * V[i][j] for i in range(t)) for j in range(t)]
            self._coord_map[p] = tuple(
                full[j] % diag[j] for j in keep
            )
        # round trip: coords are a bijection onto the product of Z/d_i
        seen = set()
        for p, c in self._coord_map.items():
            if c in seen:
                raise GroupError("coordinate collision in abelian structure")
            seen.add(c)
            if self.element_of(c) != p:
                raise GroupError("coordinate round trip failed")

    @property
    def order(self) -> int:
        return self.subgroup.order

    def coords(self, p) -> tuple:
        try:
            return self._coord_map[p]
        except KeyError:
            raise GroupError("element outside the subgroup") from None

    def element_of(self, coords) -> tuple:
        p = self.subgroup.parent.identity
        for c, b, d in zip(coords, self.basis, self.invariant_factors):
            q = b
            for _ in range(c % d):
                p = mult(p, q)
        return p

    def character(self, coords) -> "Character":
        if len(coords) != len(self.invariant_factors):
            raise GroupError("character coordinate length mismatch")
        reduced = tuple(c % d for c, d in zip(coords, self.invariant_factors))
        return Character(self, reduced)

    def trivial_character(self) -> "Character":
        return Character(self, (0,) * len(self.invariant_factors))

    def all_characters(self):
        """Every character, in lexicographic coordinate order."""
        out = [()]
        for d in self.invariant_factors:
            out = [c + (r,) for c in out for r in range(d)]
        return [Character(self, c) for c in out]

    def __repr__(self):
        return f"<AbelianStructure {list(self.invariant_factors)} on order {self.order}>"


def perm_order_cached(parent, p):
    return parent.element_order(parent.index(p))


def structure_of(sub: Subgroup) -> AbelianStructure:
    """Cached abelian structure; one instance per subgroup key per group."""
    parent = sub.parent
    cache = getattr(parent, "_abelian_structures", None)
    if cache is None:
        cache = {}
        parent._abelian_structures = cache
    st = cache.get(sub.key)
    if st is None:
        st = AbelianStructure(sub)
        cache[sub.key] = st
    return st


@dataclass(frozen=True)
class Character:
    """A character of a finite abelian group, as residues against the basis."""

    owner: AbelianStructure
    coords: tuple

    def _same(self, other):
        if self.owner is not other.owner:
            raise GroupError("characters belong to different structures")

    def __add__(self, other):
        self._same(other)
        return self.owner.character(
            tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        self._same(other)
        return self.owner.character(
            tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        return self.owner.character(tuple(-a for a in self.coords))

    def scale(self, m: int) -> "Character":
        return self.owner.character(tuple(m * a for a in self.coords))

    @property
    def is_trivial(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        n = 1
        for c, d in zip(self.coords, self.owner.invariant_factors):
            n = _lcm(n, d // gcd(c, d))
        return n

    def residue(self, p) -> int:
        """b(p) as a residue mod exp(H)."""
        own = self.owner
        y = own.coords(p)
        E = own.exponent
        total = 0
        for c, yj, d in zip(self.coords, y, own.invariant_factors):
            total += c * yj * (E // d)
        return total % E

    def pairing(self, p) -> Fraction:
        """b(p) as an element of Q/Z, comparable across groups."""
        E = self.owner.exponent
        return Fraction(self.residue(p), E) % 1

    def kernel(self) -> Subgroup:
        own = self.owner
        parent = own.subgroup.parent
        idx = frozenset(
            parent.index(p) for p in own.subgroup.elements if self.residue(p) == 0
        )
        return parent.subgroup_from_indices(idx)

    def __eq__(self, other):
        return (
            isinstance(other, Character)
            and self.owner is other.owner
            and self.coords == other.coords
        )

    def __lt__(self, other):
        self._same(other)
        return self.coords < other.coords

    def __hash__(self):
        return hash((id(self.owner), self.coords))


def _transport(b: Character, target: AbelianStructure, pull) -> Character:
    """Character of the target structure whose Q/Z values match b∘pull.

    ``pull`` sends an element of the target subgroup to one of b's subgroup.
    Solves coordinates from values on the target basis: the value m/d_i of
    b at pull(basis_i) determines coordinate m mod d_i.
    """
    E = b.owner.exponent
    coords = []
    for h, d in zip(target.basis, target.invariant_factors):
        v = b.residue(pull(h))
        num = v * d
        if num % E:
            raise GroupError("character value of unexpected order during transport")
        coords.append((num // E) % d)
    out = target.character(tuple(coords))
    if VERIFY_CHARACTERS:
        for p in target.subgroup.elements:
            if out.pairing(p) != b.pairing(pull(p)):
                raise GroupError("transported character disagrees on an element")
    return out


def transport_character(b: Character, target: AbelianStructure, pull) -> Character:
    """Public transport along an arbitrary pull map; see _transport."""
    return _transport(b, target, pull)


def restrict_character(b: Character, target: AbelianStructure) -> Character:
    """Restriction along a subgroup inclusion target <= owner."""
    if not target.subgroup.elements <= b.owner.subgroup.elements:
        raise GroupError("restriction target is not a subgroup of the owner")
    return _transport(b, target, lambda h: h)


def kernel_of_difference(b1: Character, b2: Character) -> Subgroup:
    """Kernel of b1 - b2, the subgroup the blowup kernel term lives on."""
    b1._same(b2)
    return (b1 - b2).kernel()


def conjugate_character(b: Character, g, target: AbelianStructure) -> Character:
    """b^g with b^g(x) = b(g^-1 x g), a character of gHg^-1."""
    own = b.owner.subgroup
    ginv = inverse(g)
    expect = frozenset(mult(mult(g, p), ginv) for p in own.elements)
    if expect != target.subgroup.elements:
        raise GroupError("conjugation target must be gHg^-1")
    return _transport(b, target, lambda x: mult(mult(ginv, x), g))


def generates_dual(chars, structure: AbelianStructure) -> bool:
    """True iff the characters generate the full dual, i.e. their kernels
    intersect trivially."""
    ident = structure.subgroup.parent.identity
    for p in structure.subgroup.elements:
        if p == ident:
            continue
        if all(b.residue(p) == 0 for b in chars):
            return False
    return True


def in_cyclic_span(b: Character, c: Character) -> bool:
    """True iff b = m*c for some integer m."""
    b._same(c)
    for m in range(c.order()):
        if c.scale(m) == b:
            return True
    return False


def subgroup_lattice(sub: Subgroup) -> list:
    """All subgroups of an abelian subgroup, sorted by (order, key)."""
    if not sub.is_abelian():
        raise GroupError("subgroup lattice implemented for abelian subgroups only")
    return subgroups_between(sub.parent.trivial_subgroup(), sub)


class MoebiusTable:
    """Moebius function of the subgroup lattice of an abelian group.

    Recursion: mu(B, B) = 1; mu(A, B) = 0 unless A <= B;
    mu(A, B) = -sum of mu(A, C) over A <= C < B.
    """

    def __init__(self, sub: Subgroup):
        self.top = sub
        self.subgroups = subgroup_lattice(sub)
        self._pos = {s.key: i for i, s in enumerate(self.subgroups)}
        n = len(self.subgroups)
        keysets = [frozenset(s.key) for s in self.subgroups]
        # per-subgroup sublists keep the fill quadratic in interval sizes,
        # not cubic in the lattice size
        subs_of = [
            [a for a in range(n) if keysets[a] <= keysets[b]] for b in range(n)
        ]
        self._subs_set = [set(lst) for lst in subs_of]
        table: dict[tuple[int, int], int] = {}
        # fill by increasing order of the upper subgroup (list is sorted)
        for b in range(n):
            below = subs_of[b]
            for a in below:
                if a == b:
                    table[(a, b)] = 1
                    continue
                acc = 0
                for c in below:
                    if c != b and a in self._subs_set[c]:
                        acc += table[(a, c)]
                table[(a, b)] = -acc
        self._table = table

    def index_of(self, sub: Subgroup) -> int:
        try:
            return self._pos[sub.key]
        except KeyError:
            raise GroupError("subgroup is not in this lattice") from None

    def mu(self, lower: Subgroup, upper: Subgroup) -> int:
        a = self.index_of(lower)
        b = self.index_of(upper)
        if a not in self._subs_set[b]:
            return 0
        return self._table[(a, b)]


def moebius(sub: Subgroup) -> MoebiusTable:
    return MoebiusTable(sub)
