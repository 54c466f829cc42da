"""Top-level computations: group values, per-class decomposition, the
equivalence check between the two presentations, restriction, products,
filtration, dimension, and class orders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .abelian import (
    restrict_character,
    structure_of,
    transport_character,
    conjugate_character,
)
from .groups import (
    GroupError,
    PermutationGroup,
    Subgroup,
    direct_product,
)
from .perms import format_perm, parse_generators, pad, perm_order
from .symbols import (
    FormalSum,
    Presentation,
    Symbol,
    SymbolCalculus,
    phi,
    psi,
)
from .zlattice import (
    AbelianInvariants,
    IntLattice,
    induced_iso_check,
    order_in_cokernel,
    subquotient_invariants,
)

__all__ = [
    "calculus",
    "bc",
    "bc_prime",
    "verify_main",
    "restrict",
    "product",
    "product_prime_abelian",
    "filtration",
    "filtration_surjective",
    "max_element_order",
    "cd",
    "class_order",
    "DecompositionReport",
    "VerificationReport",
    "CdReport",
    "symbol_to_dict",
    "symbol_from_dict",
    "formal_sum_to_dict",
    "formal_sum_from_dict",
    "group_display",
]


def calculus(G: PermutationGroup) -> SymbolCalculus:
    """Shared per-group symbol context (pair classes, canonical forms)."""
    calc = getattr(G, "_symbol_calculus", None)
    if calc is None:
        calc = SymbolCalculus(G)
        G._symbol_calculus = calc
    return calc


def group_display(G: PermutationGroup) -> str:
    return G.name or f"group of order {G.order} on {G.degree} points"


# -- values and decomposition ------------------------------------------------------


def bc(G: PermutationGroup, n: int) -> AbelianInvariants:
    """Invariants of the coarse presentation."""
    return calculus(G).presentation(n, "BC").invariants()


@dataclass
class Summand:
    index: int
    display: str
    h_order: int
    y_order: int
    orbit_size: int
    invariants: AbelianInvariants


@dataclass
class DecompositionReport:
    group: str
    n: int
    summands: list
    total: AbelianInvariants

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "n": self.n,
            "flavor": "per-class",
            **self.total.to_dict(),
            "summands": [
                {
                    "class": s.index,
                    "pair": s.display,
                    "h_order": s.h_order,
                    "y_order": s.y_order,
                    "orbit_size": s.orbit_size,
                    **s.invariants.to_dict(),
                }
                for s in self.summands
            ],
        }


def bc_prime(G: PermutationGroup, n: int) -> DecompositionReport:
    """Per-class tuple-quotient invariants and their direct sum."""
    calc = calculus(G)
    summands = []
    total = AbelianInvariants.trivial()
    for pc in calc.classes:
        inv = calc.tuple_presentation(pc.index, n).invariants()
        summands.append(
            Summand(pc.index, pc.display(), pc.h.order, pc.y.order, pc.orbit_size, inv)
        )
        total = total.direct_sum(inv)
    return DecompositionReport(group_display(G), n, summands, total)


# -- the equivalence check ----------------------------------------------------------


@dataclass
class VerificationReport:
    group: str
    n: int
    relations_forward: bool
    relations_backward: bool
    inverse_identity: bool
    iso: bool
    invariants: AbelianInvariants
    invariants_primed: AbelianInvariants
    decomposition_total: AbelianInvariants

    @property
    def ok(self) -> bool:
        return (
            self.relations_forward
            and self.relations_backward
            and self.inverse_identity
            and self.iso
            and self.invariants == self.invariants_primed
            and self.invariants == self.decomposition_total
        )


def psi_matrix(calc: SymbolCalculus, pres: Presentation) -> list:
    """Image vector of each generator under the subgroup-sum map, as sparse
    rows in the shared generator index."""
    return [pres.row_of(psi(calc, g)) for g in pres.generators]


def _maps_relations(rows_a, mapping, lattice_b, ncols) -> bool:
    for rel in rows_a:
        img = [0] * ncols
        for c, v in rel.items():
            for j, w in mapping[c].items():
                img[j] += v * w
        if not lattice_b.contains(img):
            return False
    return True


def verify_main(G: PermutationGroup, n: int) -> VerificationReport:
    """Machine check that the coarse and per-class presentations agree.

    Builds both, maps every relation through the subgroup-sum map (and its
    Moebius inverse backwards), checks the composite is the identity modulo
    relations, and compares invariants with the per-class direct sum.
    """
    calc = calculus(G)
    p = calc.presentation(n, "BC")
    pp = calc.presentation(n, "BCP")
    if p.generators != pp.generators:
        raise GroupError("presentations disagree on the generator index")
    ngen = len(p.generators)
    psi_rows = psi_matrix(calc, pp)
    phi_rows = [p.row_of(phi(calc, g)) for g in p.generators]

    lat_p = IntLattice(ngen, p.rows)
    lat_pp = IntLattice(ngen, pp.rows)
    forward = _maps_relations(p.rows, psi_rows, lat_pp, ngen)
    backward = _maps_relations(pp.rows, phi_rows, lat_p, ngen)

    inverse_ok = True
    for i in range(ngen):
        comp = {}
        for j, v in psi_rows[i].items():
            for k, w in phi_rows[j].items():
                comp[k] = comp.get(k, 0) + v * w
        comp[i] = comp.get(i, 0) - 1
        vec = [comp.get(k, 0) for k in range(ngen)]
        if any(vec) and not lat_p.contains(vec):
            inverse_ok = False
            break

    iso = forward and induced_iso_check(p.matrix(), pp.matrix(), psi_rows)
    deco = bc_prime(G, n)
    return VerificationReport(
        group_display(G),
        n,
        forward,
        backward,
        inverse_ok,
        iso,
        p.invariants(),
        pp.invariants(),
        deco.total,
    )


# -- restriction -------------------------------------------------------------------


def _conjugate_triple(h, y, chars, g):
    h2 = h.conjugate_by(g)
    y2 = y.conjugate_by(g)
    st2 = structure_of(h2)
    return h2, y2, [conjugate_character(b, g, st2) for b in chars]


def _triple_key(h, y, chars):
    return (h.key, y.key, tuple(sorted(b.coords for b in chars)))


def _symbol_orbit(calc: SymbolCalculus, sym: Symbol) -> dict:
    """All G-conjugates of the representative triple, keyed canonically."""
    pc = calc.classes[sym.cls]
    st = calc.structures[sym.cls]
    chars = [st.character(c) for c in sym.beta]
    start = (pc.h, pc.y, chars)
    orbit = {_triple_key(*start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for h, y, cs in frontier:
            for g in calc.group.generators:
                moved = _conjugate_triple(h, y, cs, g)
                key = _triple_key(*moved)
                if key not in orbit:
                    orbit[key] = moved
                    nxt.append(moved)
        frontier = nxt
    return orbit


def subgroup_of(G: PermutationGroup, generators) -> PermutationGroup:
    """Standalone group on the same points from generators inside G.

    Generators may be a single cycle-notation string, a list of such
    strings, or a list of permutation tuples.
    """
    if isinstance(generators, str):
        _, gens = parse_generators(generators, degree=G.degree)
    else:
        gens = []
        for g in generators:
            if isinstance(g, str):
                _, parsed = parse_generators(g, degree=G.degree)
                gens.extend(parsed)
            else:
                gens.append(pad(tuple(g), G.degree))
    for g in gens:
        if g not in G:
            raise GroupError("generator lies outside the ambient group")
    return PermutationGroup(G.degree, gens)


def restrict(G: PermutationGroup, Gp: PermutationGroup, x: FormalSum, n: int):
    """Restriction to a subgroup: partition each symbol's conjugates into
    orbits of the subgroup, intersect the pair, restrict the characters.

    Intersections with trivial H and symbols acquiring a trivial restricted
    character contribute zero.  Returns a FormalSum over the subgroup's own
    canonical symbols.
    """
    if not set(Gp.elements) <= set(G.elements):
        raise GroupError("restriction target is not a subgroup")
    calc = calculus(G)
    calcp = calculus(Gp)
    gp_elems = set(Gp.elements)
    out = FormalSum()
    for sym, coeff in x.items():
        if sym.r() > n:
            raise GroupError("symbol length exceeds n")
        orbit = _symbol_orbit(calc, sym)
        # split the G-orbit into Gp-orbits, walking keys deterministically
        assigned = set()
        for key in sorted(orbit):
            if key in assigned:
                continue
            rep = orbit[key]
            frontier = [rep]
            assigned.add(key)
            while frontier:
                nxt = []
                for h, y, cs in frontier:
                    for g in Gp.generators:
                        moved = _conjugate_triple(h, y, cs, g)
                        mkey = _triple_key(*moved)
                        if mkey not in assigned:
                            assigned.add(mkey)
                            nxt.append(moved)
                frontier = nxt
            h, y, cs = rep
            hcap_idx = frozenset(Gp.index(p) for p in h.elements if p in gp_elems)
            if len(hcap_idx) == 1:
                continue
            hcap = Gp.subgroup_from_indices(hcap_idx)
            ycap = Gp.subgroup_from_indices(
                frozenset(Gp.index(p) for p in y.elements if p in gp_elems)
            )
            stcap = structure_of(hcap)
            restricted = [restrict_character(b, stcap) for b in cs]
            if any(b.is_trivial for b in restricted):
                continue
            out.add(calcp.canonical_symbol(hcap, ycap, restricted), coeff)
    return out


# -- products ----------------------------------------------------------------------


def product(G: PermutationGroup, x, n: int, y, m: int) -> FormalSum:
    """Product via the doubled group and restriction to the diagonal."""
    if n == 0 or m == 0:
        # empty classes act by integer scaling
        if n == 0 and m == 0:
            raise GroupError("at least one factor must have positive length")
        scalar, fs = (x, y) if n == 0 else (y, x)
        if not isinstance(scalar, int):
            raise GroupError("length-zero classes are plain integers")
        return fs.scale(scalar)
    ctx = getattr(G, "_product_context", None)
    if ctx is None:
        dp = direct_product(G, G)
        diag = subgroup_of(dp.group, [dp.embed(g, g) for g in G.generators])
        ctx = G._product_context = (dp, diag)
    dp, diag = ctx
    Gx = dp.group
    calc = calculus(G)
    calcx = calculus(Gx)
    combined = FormalSum()
    for s1, c1 in x.items():
        pc1 = calc.classes[s1.cls]
        st1 = calc.structures[s1.cls]
        chars1 = [st1.character(c) for c in s1.beta]
        for s2, c2 in y.items():
            pc2 = calc.classes[s2.cls]
            st2 = calc.structures[s2.cls]
            chars2 = [st2.character(c) for c in s2.beta]
            hx = _embedded_product(Gx, dp, pc1.h, pc2.h)
            yx = _embedded_product(Gx, dp, pc1.y, pc2.y)
            stx = structure_of(hx)
            inflated = [
                transport_character(b, stx, lambda e: dp.project(e)[0]) for b in chars1
            ] + [
                transport_character(b, stx, lambda e: dp.project(e)[1]) for b in chars2
            ]
            combined.add(calcx.canonical_symbol(hx, yx, inflated), c1 * c2)
    restricted = restrict(Gx, diag, combined, n + m)
    # transport along the diagonal isomorphism back to G
    calcd = calculus(diag)
    out = FormalSum()
    for sym, coeff in restricted.items():
        pc = calcd.classes[sym.cls]
        std = calcd.structures[sym.cls]
        chars = [std.character(c) for c in sym.beta]
        h = G.subgroup_from_indices(
            frozenset(G.index(dp.project(p)[0]) for p in pc.h.elements)
        )
        yv = G.subgroup_from_indices(
            frozenset(G.index(dp.project(p)[0]) for p in pc.y.elements)
        )
        st = structure_of(h)
        moved = [transport_character(b, st, lambda a: dp.embed(a, a)) for b in chars]
        out.add(calculus(G).canonical_symbol(h, yv, moved), coeff)
    return out


def _embedded_product(Gx, dp, a: Subgroup, b: Subgroup) -> Subgroup:
    elems = frozenset(dp.embed(p, q) for p in a.elements for q in b.elements)
    idx = frozenset(Gx.index(e) for e in elems)
    return Gx.subgroup_from_indices(idx)


def product_prime_abelian(G: PermutationGroup, x: FormalSum, y: FormalSum) -> FormalSum:
    """Shortcut product on primed classes of an abelian group: zero unless
    the two symbols share H, else concatenate over the intersected Y."""
    if not G.is_abelian():
        raise GroupError("shortcut product requires an abelian group")
    calc = calculus(G)
    out = FormalSum()
    for s1, c1 in x.items():
        pc1 = calc.classes[s1.cls]
        for s2, c2 in y.items():
            pc2 = calc.classes[s2.cls]
            if pc1.h.key != pc2.h.key:
                continue
            ycap = G.subgroup_from_indices(
                frozenset(i for i in pc1.y.key) & frozenset(i for i in pc2.y.key)
            )
            st = structure_of(pc1.h)
            chars = [st.character(c) for c in s1.beta + s2.beta]
            out.add(calc.canonical_symbol(pc1.h, ycap, chars), c1 * c2)
    return out


# -- filtration --------------------------------------------------------------------


def filtration(G: PermutationGroup, n: int, r: int) -> AbelianInvariants:
    """Invariants of the span of symbols with at most r distinct characters."""
    if not 1 <= r <= n:
        raise GroupError("filtration needs 1 <= r <= n")
    pres = calculus(G).presentation(n, "BC")
    span = []
    for i, g in enumerate(pres.generators):
        if g.distinct() <= r:
            span.append({i: 1})
    return subquotient_invariants(pres.matrix(), span)


def filtration_surjective(G: PermutationGroup, n: int, r: int) -> bool:
    """Do the length-<= r symbols span the whole r-distinct filtration step?"""
    if not 1 <= r <= n:
        raise GroupError("filtration needs 1 <= r <= n")
    pres = calculus(G).presentation(n, "BC")
    ngen = len(pres.generators)
    lat = IntLattice(ngen, pres.rows)
    for i, g in enumerate(pres.generators):
        if g.r() <= r:
            lat.add({i: 1})
    for i, g in enumerate(pres.generators):
        if g.distinct() <= r:
            vec = [0] * ngen
            vec[i] = 1
            if not lat.contains(vec):
                return False
    return True


def max_element_order(G: PermutationGroup) -> int:
    return max(perm_order(p) for p in G.elements)


# -- combinatorial dimension ---------------------------------------------------------


@dataclass
class CdReport:
    group: str
    coefficients: str
    value: int
    bound: int
    conjectured_log2: float
    checked: list = field(default_factory=list)  # (m, is_zero, method)

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "coefficients": self.coefficients,
            "cd": self.value,
            "bound": self.bound,
            "conjectured_log2_bound": self.conjectured_log2,
            "checked": [
                {"n": m, "zero": z, "method": meth} for m, z, meth in self.checked
            ],
        }


def _min_padding_cost(values, mults, add_table, order_of, cap) -> int:
    """Least number of duplicated entries needed for a nonempty zero-sum
    selection, or cap + 1 if none exists within the cap.

    Values are element indices of the dual group; a selection may use each
    value v up to mults[v] times for free, further copies cost 1 each.
    """
    INF = cap + 1
    nstates = len(add_table[0]) if add_table else 1
    # parallel tables over sums: cost for possibly-empty and for nonempty
    # selections, so the empty selection never certifies
    dist_any = [INF] * nstates
    dist_any[0] = 0
    dist_ne = [INF] * nstates
    for v, mv in zip(values, mults):
        limit = mv + order_of[v] - 1
        step = add_table[v]
        best_any = list(dist_any)
        best_ne = list(dist_ne)
        for s in range(nstates):
            da = dist_any[s]
            dn = dist_ne[s]
            if da >= INF and dn >= INF:
                continue
            t = s
            for j in range(1, limit + 1):
                t = step[t]
                c = j - mv if j > mv else 0
                if da + c < best_ne[t]:
                    best_ne[t] = da + c
                if da + c < best_any[t]:
                    best_any[t] = da + c
                if dn + c < best_ne[t]:
                    best_ne[t] = dn + c
        dist_any = best_any
        dist_ne = best_ne
    return dist_ne[0]


class _ClassCertifier:
    """Zero certificates for one pair class: a symbol dies once its
    characters, padded with copies of themselves within the length budget,
    contain a nonempty zero-sum subset."""

    def __init__(self, calc: SymbolCalculus, cls: int):
        st = calc.structures[cls]
        self.cls = cls
        self.st = st
        elements = st.subgroup.sorted_elements()
        pos = {p: i for i, p in enumerate(elements)}
        self.nontrivial = [c for c in calc.chars[cls] if any(c)]
        # dual group as an abstract abelian group: index characters by their
        # coordinate tuples and realize addition through coordinates
        dual_elems = sorted(calc.chars[cls])
        self.dual_pos = {c: i for i, c in enumerate(dual_elems)}
        divisors = st.invariant_factors
        self.add_table = []
        for c in dual_elems:
            step = []
            for d in dual_elems:
                s = tuple((a + b) % q for a, b, q in zip(c, d, divisors))
                step.append(self.dual_pos[s])
            self.add_table.append(step)
        self.order_of = [st.character(c).order() for c in dual_elems]
        self._memo = {}

    def certified(self, beta, m: int) -> bool:
        """Is the symbol with these character coords zero in the length-m
        group by the padding certificate?"""
        key = beta
        cost = self._memo.get(key)
        if cost is None:
            counts = {}
            for c in beta:
                counts[c] = counts.get(c, 0) + 1
            values = [self.dual_pos[c] for c in counts]
            mults = list(counts.values())
            cap = max(self.order_of) + len(beta)
            cost = _min_padding_cost(
                values, mults, self.add_table, self.order_of, cap
            )
            self._memo[key] = cost
        return len(beta) + cost <= m


def cd(G: PermutationGroup, coefficients: str = "Z") -> CdReport:
    """Least n with all higher groups zero, scanned up to the proven bound.

    Zero is established per length by the padding certificate when it covers
    every generator, else by the per-class presentations; torsion is ignored
    for Q coefficients and reduced mod p for F_p.
    """
    if coefficients not in ("Z", "Q"):
        ok = coefficients.startswith("F") and coefficients[1:].isdigit()
        if ok:
            p = int(coefficients[1:])
            ok = p > 1 and all(p % d for d in range(2, int(p**0.5) + 1))
        if not ok:
            raise GroupError("coefficients must be Z, Q, or Fp with p prime")
    calc = calculus(G)
    if not calc.classes:
        return CdReport(group_display(G), coefficients, 0, 0, 0.0, [])
    bound = max(pc.h.order - 1 + pc.h.exponent() for pc in calc.classes)
    hmax = max(pc.h.order for pc in calc.classes)
    certifiers = {pc.index: _ClassCertifier(calc, pc.index) for pc in calc.classes}
    checked = []
    value = 0
    for m in range(1, bound + 1):
        all_certified = True
        for pc in calc.classes:
            cert = certifiers[pc.index]
            for r in range(1, m + 1):
                for combo in combinations_with_replacement(cert.nontrivial, r):
                    if not cert.certified(combo, m):
                        all_certified = False
                        break
                if not all_certified:
                    break
            if not all_certified:
                break
        if all_certified:
            checked.append((m, True, "certificate"))
            continue
        inv = bc_prime(G, m).total
        zero = inv.is_zero_with(coefficients)
        checked.append((m, zero, "presentation"))
        if not zero:
            value = m
    return CdReport(
        group_display(G), coefficients, value, bound, math.log2(hmax), checked
    )


# -- class orders ------------------------------------------------------------------


def class_order(G: PermutationGroup, n: int, x: FormalSum):
    """Order of the class in the length-n group; None when infinite."""
    pres = calculus(G).presentation(n, "BC")
    vec = pres.vector_of(x)
    return order_in_cokernel(pres.matrix(), vec)


# -- serialization -------------------------------------------------------------------


def symbol_to_dict(G: PermutationGroup, sym: Symbol) -> dict:
    pc = calculus(G).classes[sym.cls]
    return {
        "h_gens": [format_perm(g) for g in pc.h.generators],
        "y_gens": [format_perm(g) for g in pc.y.generators],
        "beta": [list(c) for c in sym.beta],
    }


def symbol_from_dict(G: PermutationGroup, d: dict, kind: str = "bc") -> Symbol:
    calc = calculus(G)
    h = G.subgroup(_parse_gen_list(G, d["h_gens"]))
    y = G.subgroup(_parse_gen_list(G, d["y_gens"]))
    st = structure_of(h)
    chars = [st.character(tuple(v)) for v in d["beta"]]
    return calc.canonical_symbol(h, y, chars, kind=kind)


def _parse_gen_list(G: PermutationGroup, gens) -> list:
    out = []
    for text in gens:
        _, perms = parse_generators(text, degree=G.degree)
        out.extend(perms)
    return out


def formal_sum_to_dict(G: PermutationGroup, n: int, fs: FormalSum) -> dict:
    return {
        "group": group_display(G),
        "n": n,
        "terms": [
            {"coeff": c, **symbol_to_dict(G, s)} for s, c in fs.items()
        ],
    }


def formal_sum_from_dict(G: PermutationGroup, d: dict) -> FormalSum:
    out = FormalSum()
    for term in d["terms"]:
        out.add(symbol_from_dict(G, term), term["coeff"])
    return out
