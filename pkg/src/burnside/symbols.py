"""Symbols, canonical forms, formal sums, relation systems, and the maps
between the coarse and per-class presentations.

A symbol is a pair class plus a multiset of characters of the class
representative H, stored as sorted coordinate tuples.  Reordering is folded
in by sorting, conjugation by transporting onto the class representative and
minimizing over the induced action of the pair stabilizer on characters, so
equality of canonical symbols is exactly equivalence under both relations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .abelian import (
    MoebiusTable,
    conjugate_character,
    generates_dual,
    in_cyclic_span,
    restrict_character,
    structure_of,
    subgroup_lattice,
)
from .groups import GroupError, PermutationGroup, Subgroup
from .zlattice import AbelianInvariants, IntMatrix, cokernel_invariants

__all__ = [
    "Symbol",
    "FormalSum",
    "SymbolCalculus",
    "Presentation",
    "build_presentation",
    "build_tuple_presentation",
    "blowup",
    "vanishing_rows",
    "conjugation_rows",
    "psi",
    "phi",
    "psi_sum",
    "phi_sum",
]


@dataclass(frozen=True, order=True)
class Symbol:
    """Canonical symbol: ``kind`` is "bc" for nontrivial-character multisets
    of length 1..n, "tuple" for exact-length tuples allowing zeros."""

    kind: str
    cls: int
    beta: tuple  # sorted tuple of character coordinate tuples

    def r(self) -> int:
        return len(self.beta)

    def distinct(self) -> int:
        return len(set(self.beta))


class FormalSum:
    """Integer combination of canonical symbols; zero coefficients vanish."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[Symbol, int] = {}
        if terms:
            for sym, coeff in terms.items() if isinstance(terms, dict) else terms:
                self.add(sym, coeff)

    def add(self, sym, coeff=1) -> "FormalSum":
        if sym is None or coeff == 0:
            return self
        new = self.terms.get(sym, 0) + coeff
        if new:
            self.terms[sym] = new
        else:
            del self.terms[sym]
        return self

    def __add__(self, other):
        out = FormalSum(dict(self.terms))
        for sym, c in other.terms.items():
            out.add(sym, c)
        return out

    def __sub__(self, other):
        out = FormalSum(dict(self.terms))
        for sym, c in other.terms.items():
            out.add(sym, -c)
        return out

    def scale(self, m: int) -> "FormalSum":
        out = FormalSum()
        if m:
            for sym, c in self.terms.items():
                out.add(sym, m * c)
        return out

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def items(self):
        return sorted(self.terms.items())

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "FormalSum(0)"
        bits = [f"{c}*{s.kind}[{s.cls}]{s.beta}" for s, c in self.items()]
        return "FormalSum(" + " + ".join(bits) + ")"


ACTION_CLOSURE_CAP = 10**4


class SymbolCalculus:
    """Per-group canonicalization context: pair classes, representative
    structures, and the stabilizer action on characters."""

    def __init__(self, G: PermutationGroup):
        self.group = G
        self.pairs = G.pair_system()
        self.classes = self.pairs.classes
        self.structures = []
        self.chars = []  # per class: all character coord tuples, sorted
        self.char_pos = []
        self.gen_actions = []  # per class: index maps for stabilizer generators
        self.actions = []  # per class: closed index-map set, or None if capped
        self._orbit_reps = []  # per class: lazy beta -> canonical beta table
        for pc in self.classes:
            st = structure_of(pc.h)
            self.structures.append(st)
            coords = sorted(c.coords for c in st.all_characters())
            pos = {c: i for i, c in enumerate(coords)}
            self.chars.append(coords)
            self.char_pos.append(pos)
            gen_maps = []
            for s in pc.stabilizer.generators:
                images = tuple(
                    pos[conjugate_character(st.character(c), s, st).coords]
                    for c in coords
                )
                gen_maps.append(images)
            ident = tuple(range(len(coords)))
            closed = {ident}
            frontier = [ident]
            while frontier and len(closed) <= ACTION_CLOSURE_CAP:
                nxt = []
                for a in frontier:
                    for g in gen_maps:
                        comp = tuple(g[i] for i in a)
                        if comp not in closed:
                            closed.add(comp)
                            nxt.append(comp)
                frontier = nxt
            self.gen_actions.append(gen_maps)
            self.actions.append(sorted(closed) if not frontier else None)
            self._orbit_reps.append({})
        self._lattices = {}
        self._moebius = {}
        self._sub_structures = {}
        self._presentations = {}

    # -- canonical forms -------------------------------------------------------

    def canonical_beta(self, cls: int, coords_list) -> tuple:
        """Minimum over the stabilizer orbit of the sorted coordinate tuple."""
        pos = self.char_pos[cls]
        chars = self.chars[cls]
        idxs = tuple(pos[c] for c in coords_list)
        actions = self.actions[cls]
        if actions is not None:
            best = None
            for a in actions:
                image = tuple(sorted(chars[a[i]] for i in idxs))
                if best is None or image < best:
                    best = image
            return best
        # closure too large: walk this multiset's own orbit instead and
        # remember the representative
        start = tuple(sorted(idxs))
        table = self._orbit_reps[cls]
        cached = table.get(start)
        if cached is not None:
            return cached
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for b in frontier:
                for g in self.gen_actions[cls]:
                    image = tuple(sorted(g[i] for i in b))
                    if image not in seen:
                        seen.add(image)
                        nxt.append(image)
            frontier = nxt
        best_idx = min(seen)
        best = tuple(chars[i] for i in best_idx)
        for b in seen:
            table[b] = best
        return best

    def canonical_symbol(self, h: Subgroup, y: Subgroup, characters, kind="bc"):
        """Canonicalize a raw triple; returns None (the zero symbol) when H is
        trivial.  Characters must live on structure_of(h)."""
        if h.order == 1:
            return None
        st = structure_of(h)
        if kind == "bc":
            if any(b.is_trivial for b in characters):
                raise GroupError("bc symbols require nontrivial characters")
            if not 1 <= len(characters):
                raise GroupError("bc symbols require at least one character")
        if not generates_dual(characters, st):
            raise GroupError("characters do not generate the dual")
        cls, w = self.pairs.locate(h, y)
        target = self.structures[cls]
        moved = [conjugate_character(b, w, target).coords for b in characters]
        if kind == "tuple":
            # conjugation is kept as explicit rows for tuple presentations
            return Symbol(kind, cls, tuple(sorted(moved)))
        return Symbol(kind, cls, self.canonical_beta(cls, moved))

    # -- cached per-class lattices ---------------------------------------------

    def lattice(self, cls: int):
        lat = self._lattices.get(cls)
        if lat is None:
            lat = subgroup_lattice(self.classes[cls].h)
            self._lattices[cls] = lat
        return lat

    def moebius(self, cls: int) -> MoebiusTable:
        table = self._moebius.get(cls)
        if table is None:
            table = MoebiusTable(self.classes[cls].h)
            self._moebius[cls] = table
        return table

    # -- memoized presentations ---------------------------------------------------

    def presentation(self, n: int, flavor: str) -> "Presentation":
        key = (flavor, n)
        pres = self._presentations.get(key)
        if pres is None:
            pres = build_presentation(self, n, flavor)
            self._presentations[key] = pres
        return pres

    def tuple_presentation(self, cls: int, n: int) -> "Presentation":
        key = ("BPAIR", cls, n)
        pres = self._presentations.get(key)
        if pres is None:
            pres = build_tuple_presentation(self, cls, n)
            self._presentations[key] = pres
        return pres

    # -- generator enumeration ---------------------------------------------------

    def bc_generators(self, n: int) -> list:
        """All canonical symbols with 1..n nontrivial characters generating
        the dual, across all pair classes."""
        out = set()
        for cls, st in enumerate(self.structures):
            nontrivial = [st.character(c) for c in self.chars[cls] if any(c)]
            for r in range(1, n + 1):
                for combo in combinations_with_replacement(nontrivial, r):
                    if not generates_dual(combo, st):
                        continue
                    beta = self.canonical_beta(cls, [b.coords for b in combo])
                    out.add(Symbol("bc", cls, beta))
        return sorted(out)

    def tuple_generators(self, cls: int, n: int) -> list:
        """Size-n character tuples (zeros allowed) generating the dual, as
        plain sorted multisets of one class."""
        st = self.structures[cls]
        allchars = [st.character(c) for c in self.chars[cls]]
        out = []
        for combo in combinations_with_replacement(allchars, n):
            if generates_dual(combo, st):
                out.append(Symbol("tuple", cls, tuple(b.coords for b in combo)))
        return sorted(set(out))


# -- relation rows ---------------------------------------------------------------


def _beta_chars(calc: SymbolCalculus, sym: Symbol):
    st = calc.structures[sym.cls]
    return st, [st.character(c) for c in sym.beta]


def blowup(calc: SymbolCalculus, sym: Symbol, positions, variant) -> FormalSum:
    """Relation row ``sym - expansion`` for one unordered position pair.

    variant "B2" adds the kernel-subgroup term when no character lies in the
    cyclic span of the difference; "B2P" omits it; "B" is the tuple rule with
    the single-term equal-entry case; "B:two-term" is the deliberately wrong
    two-term equal-entry reading, kept to demonstrate its failure.
    """
    i, j = positions
    if i == j or not (0 <= i < sym.r()) or not (0 <= j < sym.r()):
        raise GroupError("blowup needs two distinct valid positions")
    if (variant in ("B2", "B2P")) != (sym.kind == "bc"):
        raise GroupError("blowup variant does not match the symbol kind")
    st, chars = _beta_chars(calc, sym)
    b1, b2 = chars[i], chars[j]
    row = FormalSum()
    row.add(sym, 1)
    rest = [c for k, c in enumerate(chars) if k != i and k != j]

    if b1 == b2:
        if variant in ("B2", "B2P"):
            # duplicate shortening: drop one copy
            short = tuple(sorted(c.coords for c in chars[:j] + chars[j + 1 :]))
            row.add(Symbol(sym.kind, sym.cls, calc.canonical_beta(sym.cls, short)), -1)
        elif variant == "B":
            replaced = sorted(
                [c.coords for k, c in enumerate(chars) if k != i]
                + [st.trivial_character().coords]
            )
            row.add(Symbol("tuple", sym.cls, tuple(replaced)), -1)
        elif variant == "B:two-term":
            replaced = sorted(
                [c.coords for k, c in enumerate(chars) if k != i]
                + [st.trivial_character().coords]
            )
            row.add(Symbol("tuple", sym.cls, tuple(replaced)), -2)
        else:
            raise GroupError(f"unknown blowup variant {variant!r}")
        return row

    d1 = b1 - b2
    d2 = b2 - b1
    beta1 = sorted([d1.coords, b2.coords] + [c.coords for c in rest])
    beta2 = sorted([b1.coords, d2.coords] + [c.coords for c in rest])
    if variant in ("B", "B:two-term"):
        row.add(Symbol("tuple", sym.cls, tuple(beta1)), -1)
        row.add(Symbol("tuple", sym.cls, tuple(beta2)), -1)
        return row

    row.add(Symbol("bc", sym.cls, calc.canonical_beta(sym.cls, beta1)), -1)
    row.add(Symbol("bc", sym.cls, calc.canonical_beta(sym.cls, beta2)), -1)

    if variant == "B2":
        span_hit = any(in_cyclic_span(c, d1) for c in chars)
        kernel = d1.kernel()
        kst = _sub_structure(calc, kernel)
        restricted = [restrict_character(c, kst) for c in chars]
        trivial_hit = any(c.is_trivial for c in restricted)
        # the two criteria are one fact read through duality
        if span_hit != trivial_hit:
            raise GroupError("kernel-term criterion mismatch")
        if not span_hit:
            theta = calc.canonical_symbol(
                kernel, calc.classes[sym.cls].y, restricted, kind="bc"
            )
            row.add(theta, -1)
    elif variant != "B2P":
        raise GroupError(f"unknown blowup variant {variant!r}")
    return row


def _sub_structure(calc: SymbolCalculus, sub: Subgroup):
    st = calc._sub_structures.get(sub.key)
    if st is None:
        st = structure_of(sub)
        calc._sub_structures[sub.key] = st
    return st


def vanishing_rows(calc: SymbolCalculus, generators) -> list:
    """One row ``sym = 0`` per generator with two distinct positions whose
    characters sum to zero (equal order-2 entries at two positions count)."""
    rows = []
    for sym in generators:
        st = calc.structures[sym.cls]
        hit = False
        for i in range(sym.r()):
            for j in range(i + 1, sym.r()):
                s = st.character(sym.beta[i]) + st.character(sym.beta[j])
                if s.is_trivial:
                    hit = True
                    break
            if hit:
                break
        if hit:
            row = FormalSum()
            row.add(sym, 1)
            rows.append(row)
    return rows


def conjugation_rows(calc: SymbolCalculus, cls: int, generators) -> list:
    """Rows beta - beta^s over the stabilizer generators of one class,
    for tuple-kind generators of that class."""
    rows = []
    chars = calc.chars[cls]
    pos = calc.char_pos[cls]
    for action in calc.gen_actions[cls]:
        for sym in generators:
            if sym.cls != cls:
                continue
            moved = tuple(sorted(chars[action[pos[c]]] for c in sym.beta))
            if moved == sym.beta:
                continue
            row = FormalSum()
            row.add(sym, 1)
            row.add(Symbol(sym.kind, cls, moved), -1)
            rows.append(row)
    return rows


# -- presentations ----------------------------------------------------------------


@dataclass
class Presentation:
    group: PermutationGroup
    n: int
    flavor: str
    generators: list
    index: dict
    rows: list  # sparse rows over generator indices
    class_blocks: dict | None = None
    _invariants: AbelianInvariants | None = None

    def matrix(self) -> IntMatrix:
        return IntMatrix([dict(r) for r in self.rows], len(self.generators))

    def invariants(self) -> AbelianInvariants:
        if self._invariants is None:
            self._invariants = cokernel_invariants(len(self.generators), self.matrix())
        return self._invariants

    def row_of(self, fs: FormalSum) -> dict:
        out = {}
        for sym, coeff in fs.terms.items():
            pos = self.index.get(sym)
            if pos is None:
                raise GroupError("formal sum leaves the generator index")
            out[pos] = out.get(pos, 0) + coeff
        return {k: v for k, v in out.items() if v}

    def vector_of(self, fs: FormalSum) -> list:
        row = self.row_of(fs)
        return [row.get(i, 0) for i in range(len(self.generators))]

    def class_invariants(self, cls: int) -> AbelianInvariants:
        """Cokernel of one class block (block-diagonal flavors only)."""
        if self.class_blocks is None:
            raise GroupError("presentation has no class blocks")
        cols = self.class_blocks.get(cls, [])
        remap = {c: i for i, c in enumerate(cols)}
        colset = set(cols)
        rows = []
        for r in self.rows:
            touched = set(r) & colset
            if not touched:
                continue
            if set(r) - colset:
                raise GroupError("relation row crosses class blocks")
            rows.append({remap[c]: v for c, v in r.items()})
        return cokernel_invariants(len(cols), IntMatrix(rows, len(cols)))


def build_presentation(
    calc: SymbolCalculus, n: int, flavor: str, equal_entry_two_term=False
) -> Presentation:
    """Full presentation of one flavor.

    BC: nontrivial multisets, vanishing + shortening + blowup with kernel
    terms.  BCP: same generators, kernel terms omitted (block-diagonal over
    pair classes).  BPAIR: per-class exact-length tuples with the tuple
    blowup plus stabilizer conjugation rows.
    """
    if n < 1:
        raise GroupError("presentations need n >= 1")
    if flavor in ("BC", "BCP"):
        generators = calc.bc_generators(n)
        index = {s: i for i, s in enumerate(generators)}
        rows = []
        seen = set()
        variant = "B2" if flavor == "BC" else "B2P"
        pres = Presentation(calc.group, n, flavor, generators, index, rows)
        for fs in vanishing_rows(calc, generators):
            _push_row(pres, fs, seen)
        for sym in generators:
            for i in range(sym.r()):
                for j in range(i + 1, sym.r()):
                    _push_row(pres, blowup(calc, sym, (i, j), variant), seen)
        if flavor == "BCP":
            blocks = {}
            for i, s in enumerate(generators):
                blocks.setdefault(s.cls, []).append(i)
            pres.class_blocks = blocks
            for r in pres.rows:
                touched = {generators[c].cls for c in r}
                if len(touched) > 1:
                    raise GroupError("per-class relations must not mix classes")
        return pres
    if flavor == "BPAIR":
        raise GroupError("build BPAIR per class with build_tuple_presentation")
    raise GroupError(f"unknown flavor {flavor!r}")


def build_tuple_presentation(
    calc: SymbolCalculus,
    cls: int,
    n: int,
    with_conjugation=True,
    equal_entry_two_term=False,
) -> Presentation:
    """Tuple presentation of one pair class: exact-length-n generating
    tuples with the tuple blowup; conjugation rows fold in the stabilizer."""
    if n < 1:
        raise GroupError("presentations need n >= 1")
    generators = calc.tuple_generators(cls, n)
    index = {s: i for i, s in enumerate(generators)}
    variant = "B:two-term" if equal_entry_two_term else "B"
    flavor = "BPAIR" if with_conjugation else "B"
    pres = Presentation(calc.group, n, flavor, generators, index, [])
    seen = set()
    for sym in generators:
        for i in range(n):
            for j in range(i + 1, n):
                _push_row(pres, blowup(calc, sym, (i, j), variant), seen)
    if with_conjugation:
        for fs in conjugation_rows(calc, cls, generators):
            _push_row(pres, fs, seen)
    return pres


def _push_row(pres: Presentation, fs: FormalSum, seen: set) -> None:
    row = pres.row_of(fs)
    if not row:
        return
    key = tuple(sorted(row.items()))
    if key in seen:
        return
    seen.add(key)
    pres.rows.append(row)


# -- the maps between the presentations -------------------------------------------


def _expand(calc: SymbolCalculus, sym: Symbol, weight) -> FormalSum:
    """Sum of restricted symbols over subgroups of the representative H.

    ``weight(hsub)`` gives the coefficient; terms whose restriction acquires
    a trivial character are dropped, as is the trivial subgroup (where every
    restriction is trivial)."""
    pc = calc.classes[sym.cls]
    st, chars = _beta_chars(calc, sym)
    out = FormalSum()
    for hsub in calc.lattice(sym.cls):
        if hsub.order == 1:
            continue
        w = weight(hsub)
        if w == 0:
            continue
        sub_st = _sub_structure(calc, hsub)
        restricted = [restrict_character(b, sub_st) for b in chars]
        if any(b.is_trivial for b in restricted):
            continue
        out.add(calc.canonical_symbol(hsub, pc.y, restricted, kind="bc"), w)
    return out


def psi(calc: SymbolCalculus, sym: Symbol) -> FormalSum:
    """Sum of the restrictions of the symbol over all subgroups of H."""
    return _expand(calc, sym, lambda hsub: 1)


def phi(calc: SymbolCalculus, sym: Symbol) -> FormalSum:
    """Moebius-weighted restriction sum, the two-sided inverse of psi."""
    table = calc.moebius(sym.cls)
    top = calc.classes[sym.cls].h
    return _expand(calc, sym, lambda hsub: table.mu(hsub, top))


def psi_sum(calc: SymbolCalculus, fs: FormalSum) -> FormalSum:
    out = FormalSum()
    for sym, c in fs.terms.items():
        for s2, c2 in psi(calc, sym).terms.items():
            out.add(s2, c * c2)
    return out


def phi_sum(calc: SymbolCalculus, fs: FormalSum) -> FormalSum:
    out = FormalSum()
    for sym, c in fs.terms.items():
        for s2, c2 in phi(calc, sym).terms.items():
            out.add(s2, c * c2)
    return out
