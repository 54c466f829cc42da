"""Exact linear algebra over the integers.

Everything here runs on arbitrary-precision Python ints; there is no float
path and no overflow.  Relation matrices are stored row-sparse (one dict per
row) and fall back to dense lists once a working block is small.  Smith normal
form pivots are chosen by least absolute value to limit entry growth.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import gcd

__all__ = [
    "AbelianInvariants",
    "IntMatrix",
    "IntLattice",
    "smith_normal_form",
    "cokernel_invariants",
    "lattice_membership",
    "order_in_cokernel",
    "subquotient_invariants",
    "induced_iso_check",
]

# Re-verify U*M*V == D on every smith_normal_form call when set (test builds).
VERIFY_SNF = bool(os.environ.get("BURNSIDE_VERIFY_SNF"))


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _factorize(n: int) -> dict[int, int]:
    # trial division; torsion orders in this package stay tiny
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _chain_from_primary(primary: dict[int, list[int]]) -> tuple[int, ...]:
    # invariant-factor chain from prime-power exponents: align the largest
    # exponents of every prime into the last factor, and so on down
    columns: list[int] = []
    width = max((len(v) for v in primary.values()), default=0)
    for i in range(width):
        d = 1
        for p, exps in primary.items():
            exps_sorted = sorted(exps, reverse=True)
            if i < len(exps_sorted):
                d *= p ** exps_sorted[i]
        columns.append(d)
    columns.reverse()  # ascending divisibility d1 | d2 | ...
    return tuple(d for d in columns if d > 1)


@dataclass(frozen=True)
class AbelianInvariants:
    """A finitely generated abelian group up to isomorphism.

    ``torsion`` is the invariant-factor chain d1 | d2 | ... with every di >= 2.
    """

    free_rank: int
    torsion: tuple[int, ...]

    @classmethod
    def from_divisors(cls, free_rank: int, divisors) -> "AbelianInvariants":
        """Canonicalize an arbitrary multiset of cyclic orders (0 means Z)."""
        primary: dict[int, list[int]] = {}
        for d in divisors:
            if d == 0:
                free_rank += 1
                continue
            d = abs(d)
            if d == 1:
                continue
            for p, e in _factorize(d).items():
                primary.setdefault(p, []).append(e)
        return cls(free_rank, _chain_from_primary(primary))

    @classmethod
    def trivial(cls) -> "AbelianInvariants":
        return cls(0, ())

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def direct_sum(self, other: "AbelianInvariants") -> "AbelianInvariants":
        return AbelianInvariants.from_divisors(
            self.free_rank + other.free_rank, self.torsion + other.torsion
        )

    def primary_parts(self) -> list[tuple[int, int]]:
        """(prime power q, multiplicity) pairs, grouped by prime then exponent."""
        counts: dict[tuple[int, int], int] = {}
        for d in self.torsion:
            for p, e in _factorize(d).items():
                counts[(p, e)] = counts.get((p, e), 0) + 1
        return [(p**e, k) for (p, e), k in sorted(counts.items())]

    def chain_display(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " x ".join(parts) if parts else "0"

    def primary_display(self) -> str:
        parts = []
        for q, k in self.primary_parts():
            parts.append(f"Z/{q}" if k == 1 else f"(Z/{q})^{k}")
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " x ".join(parts) if parts else "0"

    def is_zero_with(self, coefficients: str) -> bool:
        """Vanishing after tensoring with Z, Q, or F_p coefficients."""
        if coefficients == "Z":
            return self.is_trivial
        if coefficients == "Q":
            return self.free_rank == 0
        if coefficients.startswith("F"):
            p = int(coefficients[1:])
            return self.free_rank == 0 and all(d % p for d in self.torsion)
        raise ValueError(f"unknown coefficient ring {coefficients!r}")

    def to_dict(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "primary_display": self.primary_display(),
        }


class IntMatrix:
    """Row-sparse integer matrix: one {column: value} dict per row."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: list[dict[int, int]], ncols: int):
        self.rows = rows
        self.ncols = ncols

    @classmethod
    def from_dense(cls, dense: list[list[int]], ncols: int | None = None) -> "IntMatrix":
        if ncols is None:
            ncols = len(dense[0]) if dense else 0
        rows = [{j: v for j, v in enumerate(r) if v} for r in dense]
        return cls(rows, ncols)

    def to_dense(self) -> list[list[int]]:
        return [[r.get(j, 0) for j in range(self.ncols)] for r in self.rows]

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def copy(self) -> "IntMatrix":
        return IntMatrix([dict(r) for r in self.rows], self.ncols)


def _as_sparse_rows(matrix) -> tuple[list[dict[int, int]], int]:
    if isinstance(matrix, IntMatrix):
        return [dict(r) for r in matrix.rows], matrix.ncols
    raise TypeError("expected IntMatrix")


def _identity_dense(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _snf_dense(A: list[list[int]], ncols: int, track: bool):
    """Diagonalize A in place; return (diag, U, V, Vinv) (transforms None if untracked).

    Invariants kept by every step: U*M_original*V == A_current, Vinv == V^-1.
    """
    n = len(A)
    m = ncols
    U = _identity_dense(n) if track else None
    V = _identity_dense(m) if track else None
    Vinv = _identity_dense(m) if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def row_sub(i, j, q):
        # row_i -= q * row_j
        if not q:
            return
        Ai, Aj = A[i], A[j]
        for k in range(m):
            if Aj[k]:
                Ai[k] -= q * Aj[k]
        if track:
            Ui, Uj = U[i], U[j]
            for k in range(n):
                if Uj[k]:
                    Ui[k] -= q * Uj[k]

    def col_sub(j, i, q):
        # col_j -= q * col_i ; Vinv gets the inverse op: row_i += q * row_j
        if not q:
            return
        for row in A:
            if row[i]:
                row[j] -= q * row[i]
        if track:
            for row in V:
                if row[i]:
                    row[j] -= q * row[i]
            Ri, Rj = Vinv[i], Vinv[j]
            for k in range(m):
                if Rj[k]:
                    Ri[k] += q * Rj[k]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if track:
            U[i] = [-x for x in U[i]]

    rank_limit = min(n, m)
    t = 0
    while t < rank_limit:
        # least-absolute-value pivot in the trailing block
        best = None
        for i in range(t, n):
            Ai = A[i]
            for j in range(t, m):
                v = Ai[j]
                if v:
                    a = abs(v)
                    if best is None or a < best[0]:
                        best = (a, i, j)
                        if a == 1:
                            break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(pi, t)
        if pj != t:
            swap_cols(pj, t)
        if A[t][t] < 0:
            negate_row(t)
        while True:
            dirty = False
            for i in range(n):
                if i != t and A[i][t]:
                    q = A[i][t] // A[t][t]
                    row_sub(i, t, q)
                    if A[i][t]:
                        swap_rows(i, t)
                        if A[t][t] < 0:
                            negate_row(t)
                        dirty = True
            if dirty:
                continue
            for j in range(m):
                if j != t and A[t][j]:
                    q = A[t][j] // A[t][t]
                    col_sub(j, t, q)
                    if A[t][j]:
                        swap_cols(j, t)
                        dirty = True
            if not dirty:
                break
        t += 1
    rank = t

    # enforce the divisibility chain d1 | d2 | ...
    t = 0
    while t < rank - 1:
        fixed = True
        for s in range(t + 1, rank):
            if A[s][s] % A[t][t]:
                # pull row s into column t and redo elimination at t
                col_sub(t, s, -1)
                pivot = t
                while True:
                    dirty = False
                    for i in range(n):
                        if i != pivot and A[i][pivot]:
                            q = A[i][pivot] // A[pivot][pivot]
                            row_sub(i, pivot, q)
                            if A[i][pivot]:
                                swap_rows(i, pivot)
                                if A[pivot][pivot] < 0:
                                    negate_row(pivot)
                                dirty = True
                    if dirty:
                        continue
                    for j in range(m):
                        if j != pivot and A[pivot][j]:
                            q = A[pivot][j] // A[pivot][pivot]
                            col_sub(j, pivot, q)
                            if A[pivot][j]:
                                swap_cols(j, pivot)
                                dirty = True
                    if not dirty:
                        break
                fixed = False
                break
        if fixed:
            t += 1
    # the divisibility fix can leave negative trailing entries
    for i in range(rank):
        if A[i][i] < 0:
            negate_row(i)
    diag = [A[i][i] for i in range(rank)]
    return diag, U, V, Vinv


@dataclass
class SNFResult:
    diag: list[int]
    d: IntMatrix
    u: list[list[int]]
    v: list[list[int]]
    vinv: list[list[int]]


def smith_normal_form(matrix: IntMatrix) -> SNFResult:
    """Smith normal form with transforms: U * M * V == D.

    D is diagonal with d1 | d2 | ..., U and V unimodular.  With
    BURNSIDE_VERIFY_SNF set, the product is re-verified on every call.
    """
    rows, ncols = _as_sparse_rows(matrix)
    dense = [[r.get(j, 0) for j in range(ncols)] for r in rows]
    original = [row[:] for row in dense]
    diag, U, V, Vinv = _snf_dense(dense, ncols, track=True)
    D = IntMatrix.from_dense(dense, ncols)
    if VERIFY_SNF:
        _verify_snf(original, ncols, diag, U, V, Vinv)
    return SNFResult(diag, D, U, V, Vinv)


def _verify_snf(M, ncols, diag, U, V, Vinv):
    n = len(M)
    UM = [[sum(U[i][k] * M[k][j] for k in range(n)) for j in range(ncols)] for i in range(n)]
    UMV = [
        [sum(UM[i][k] * V[k][j] for k in range(ncols)) for j in range(ncols)] for i in range(n)
    ]
    for i in range(n):
        for j in range(ncols):
            expect = diag[i] if i == j and i < len(diag) else 0
            if UMV[i][j] != expect:
                raise AssertionError("SNF postcondition U*M*V == D failed")
    VVinv = [
        [sum(V[i][k] * Vinv[k][j] for k in range(ncols)) for j in range(ncols)]
        for i in range(ncols)
    ]
    for i in range(ncols):
        for j in range(ncols):
            if VVinv[i][j] != (1 if i == j else 0):
                raise AssertionError("SNF postcondition V*Vinv == I failed")


def _eliminate_unit_pivots(rows: list[dict[int, int]]) -> tuple[int, list[dict[int, int]]]:
    """Strike rows with a +-1 entry by exact row reduction.

    Each struck pivot contributes an invariant factor 1.  Returns
    (number of unit pivots, residual rows).  Sound because clearing a unit
    pivot's column by row ops and then its row by column ops touches no other
    entry once the column is clear.
    """
    import heapq

    col_rows: dict[int, set[int]] = {}
    live: set[int] = set()
    for i, row in enumerate(rows):
        if row:
            live.add(i)
            for c in row:
                col_rows.setdefault(c, set()).add(i)

    heap: list[tuple[int, int, int]] = []

    def push_units(i: int) -> None:
        row = rows[i]
        for c, v in row.items():
            if v == 1 or v == -1:
                score = (len(row) - 1) * (len(col_rows[c]) - 1)
                heapq.heappush(heap, (score, i, c))

    for i in live:
        push_units(i)

    pivots = 0
    while heap:
        score, i, c = heapq.heappop(heap)
        if i not in live:
            continue
        row = rows[i]
        v = row.get(c)
        if v not in (1, -1):
            continue
        cur = (len(row) - 1) * (len(col_rows[c]) - 1)
        if cur != score:
            heapq.heappush(heap, (cur, i, c))
            continue
        # eliminate column c using row i
        pivots += 1
        live.discard(i)
        for cc in row:
            col_rows[cc].discard(i)
        targets = list(col_rows.get(c, ()))
        for j in targets:
            other = rows[j]
            factor = other[c] * v  # other[c] / v since v is a unit
            for cc, vv in row.items():
                nv = other.get(cc, 0) - factor * vv
                if nv:
                    if cc not in other:
                        col_rows.setdefault(cc, set()).add(j)
                    other[cc] = nv
                else:
                    if cc in other:
                        del other[cc]
                        col_rows[cc].discard(j)
            if not other:
                live.discard(j)
            else:
                push_units(j)
        col_rows.pop(c, None)
        rows[i] = {}
    residual = [rows[i] for i in sorted(live) if rows[i]]
    return pivots, residual


def _diagonal_of(rows: list[dict[int, int]], ncols: int) -> list[int]:
    """Invariant factors (with 1s) of the row-span relation lattice."""
    work = [dict(r) for r in rows if r]
    # dedupe exact duplicate rows first; they are common in relation sets
    seen: set[tuple[tuple[int, int], ...]] = set()
    unique: list[dict[int, int]] = []
    for r in work:
        key = tuple(sorted(r.items()))
        if key not in seen:
            seen.add(key)
            unique.append(r)
    pivots, residual = _eliminate_unit_pivots(unique)
    diag = [1] * pivots
    if residual:
        cols = sorted({c for r in residual for c in r})
        remap = {c: k for k, c in enumerate(cols)}
        dense = [[0] * len(cols) for _ in residual]
        for i, r in enumerate(residual):
            for c, v in r.items():
                dense[i][remap[c]] = v
        rest, _, _, _ = _snf_dense(dense, len(cols), track=False)
        diag.extend(rest)
    return diag


def cokernel_invariants(ngens: int, relations: IntMatrix | list) -> AbelianInvariants:
    """Invariants of Z^ngens modulo the row span of ``relations``."""
    if isinstance(relations, IntMatrix):
        rows = [dict(r) for r in relations.rows]
    else:
        rows = [dict(r) for r in relations]
    diag = _diagonal_of(rows, ngens)
    rank = sum(1 for d in diag if d)
    free = ngens - rank
    return AbelianInvariants.from_divisors(free, (d for d in diag if d > 1))


class IntLattice:
    """Integer row lattice in echelon form supporting add and membership.

    Basis rows are kept with strictly increasing pivot columns; ``add``
    restores echelon shape with extended-gcd row combinations.
    """

    def __init__(self, ncols: int, rows=None):
        self.ncols = ncols
        self.pivot_rows: dict[int, list[int]] = {}  # pivot column -> row
        if rows is not None:
            for r in rows:
                self.add(r)

    @staticmethod
    def _row_from(vec, ncols) -> list[int]:
        if isinstance(vec, dict):
            row = [0] * ncols
            for c, v in vec.items():
                row[c] = v
            return row
        return list(vec)

    def add(self, vec) -> None:
        row = self._row_from(vec, self.ncols)
        for c in range(self.ncols):
            v = row[c]
            if not v:
                continue
            base = self.pivot_rows.get(c)
            if base is None:
                if v < 0:
                    row = [-x for x in row]
                self.pivot_rows[c] = row
                return
            b = base[c]
            if v % b == 0:
                q = v // b
                for k in range(c, self.ncols):
                    if base[k]:
                        row[k] -= q * base[k]
            else:
                g, x, y = xgcd(b, v)
                # new pivot row gcd(b, v); remember the reduced old row
                new = [x * base[k] + y * row[k] for k in range(self.ncols)]
                qb, qv = b // g, v // g
                old = [qv * base[k] - qb * row[k] for k in range(self.ncols)]
                self.pivot_rows[c] = new
                row = old
        # fully reduced to zero: nothing to add

    def contains(self, vec) -> bool:
        row = self._row_from(vec, self.ncols)
        for c in range(self.ncols):
            v = row[c]
            if not v:
                continue
            base = self.pivot_rows.get(c)
            if base is None or v % base[c]:
                return False
            q = v // base[c]
            for k in range(c, self.ncols):
                if base[k]:
                    row[k] -= q * base[k]
        return True

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)


def lattice_membership(relations: IntMatrix, vec) -> bool:
    """Is ``vec`` in the integer row span of ``relations``?"""
    lat = IntLattice(relations.ncols, relations.rows)
    return lat.contains(vec)


def order_in_cokernel(relations: IntMatrix, vec) -> int | None:
    """Order of the image of ``vec`` in Z^n / rowspan(relations); None if infinite.

    Computed through SNF coordinates: with U*M*V == D, the image of v has the
    order of v*V in the diagonal quotient.
    """
    res = smith_normal_form(relations)
    ncols = relations.ncols
    row = IntLattice._row_from(vec, ncols)
    V = res.v
    w = [sum(row[k] * V[k][j] for k in range(ncols)) for j in range(ncols)]
    m = 1
    for j in range(ncols):
        d = res.diag[j] if j < len(res.diag) else 0
        wj = w[j]
        if d == 0:
            if wj:
                return None
            continue
        r = wj % d
        if r:
            m = m * (d // gcd(d, r)) // gcd(m, d // gcd(d, r))
    return m


def subquotient_invariants(relations: IntMatrix, span_rows: list) -> AbelianInvariants:
    """Invariants of (S + L)/L for L = rowspan(relations), S = span of span_rows.

    The subgroup generated by the images of span_rows in the cokernel is
    Z^s / K with K the left kernel of [Y; R] projected to the first s
    coordinates; rows of U beyond the SNF rank span that left kernel.
    """
    ncols = relations.ncols
    s = len(span_rows)
    stacked: list[dict[int, int]] = []
    for r in span_rows:
        row = IntLattice._row_from(r, ncols)
        stacked.append({j: v for j, v in enumerate(row) if v})
    for r in relations.rows:
        stacked.append(dict(r))
    res = smith_normal_form(IntMatrix(stacked, ncols))
    rank = sum(1 for d in res.diag if d)
    kernel_rows = []
    for i in range(rank, len(stacked)):
        kernel_rows.append({j: v for j, v in enumerate(res.u[i][:s]) if v})
    return cokernel_invariants(s, kernel_rows)


def induced_iso_check(
    relations_a: IntMatrix, relations_b: IntMatrix, mapping_rows: list
) -> bool:
    """Does the generator map induce an isomorphism of the two cokernels?

    Checks (1) every A-relation maps into the B-relation lattice, (2) the map
    is surjective (images plus B-relations span Z^nb), (3) the cokernels have
    equal invariants.  Surjective endomorphisms of finitely generated abelian
    groups are bijective, so the three together certify an isomorphism.
    """
    na, nb = relations_a.ncols, relations_b.ncols
    if len(mapping_rows) != na:
        raise ValueError("mapping must provide one image row per A-generator")
    maps = [IntLattice._row_from(r, nb) for r in mapping_rows]
    lat_b = IntLattice(nb, relations_b.rows)
    for rel in relations_a.rows:
        img = [0] * nb
        for c, v in rel.items():
            mc = maps[c]
            for j in range(nb):
                if mc[j]:
                    img[j] += v * mc[j]
        if not lat_b.contains(img):
            return False
    stacked = [{j: v for j, v in enumerate(r) if v} for r in maps]
    stacked.extend(dict(r) for r in relations_b.rows)
    if not cokernel_invariants(nb, stacked).is_trivial:
        return False
    inv_a = cokernel_invariants(na, relations_a)
    inv_b = cokernel_invariants(nb, relations_b)
    return inv_a == inv_b
