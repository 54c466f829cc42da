"""Permutations on the points 1..m, stored as 0-indexed image tuples.

Composition is left to right: ``mult(p, q)`` applies ``p`` first, then ``q``.
Cycle notation in input and output is 1-indexed.
"""

from __future__ import annotations

import re
from math import gcd

__all__ = [
    "PermError",
    "identity",
    "mult",
    "inverse",
    "conjugate",
    "power",
    "perm_order",
    "parse_generators",
    "format_perm",
    "pad",
]


class PermError(ValueError):
    """Malformed cycle string or inconsistent permutation data."""


def identity(degree: int) -> tuple[int, ...]:
    return tuple(range(degree))


def mult(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """Compose two permutations, applying ``p`` first, then ``q``."""
    return tuple(q[i] for i in p)


def inverse(p: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def conjugate(g: tuple[int, ...], x: tuple[int, ...]) -> tuple[int, ...]:
    """The product g x g^-1, read left to right."""
    return mult(mult(g, x), inverse(g))


def power(p: tuple[int, ...], k: int) -> tuple[int, ...]:
    if k < 0:
        p, k = inverse(p), -k
    r = identity(len(p))
    while k:
        if k & 1:
            r = mult(r, p)
        p = mult(p, p)
        k >>= 1
    return r


def perm_order(p: tuple[int, ...]) -> int:
    # lcm of the cycle lengths
    seen = [False] * len(p)
    order = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        order = order * length // gcd(order, length)
    return order


def pad(p: tuple[int, ...], degree: int) -> tuple[int, ...]:
    """Extend ``p`` by fixed points up to ``degree``."""
    if len(p) > degree:
        raise PermError(f"permutation of degree {len(p)} exceeds degree {degree}")
    if len(p) == degree:
        return p
    return p + tuple(range(len(p), degree))


_CYCLE_RE = re.compile(r"\(\s*(?:\d+\s*(?:,\s*\d+\s*)*)?\s*\)")


def _cycle_points(token: str) -> list[int]:
    inner = token.strip()[1:-1].strip()
    if not inner:
        return []
    pts = [int(t) for t in inner.split(",")]
    if any(x < 1 for x in pts):
        raise PermError(f"cycle points must be >= 1: {token!r}")
    if len(set(pts)) != len(pts):
        raise PermError(f"repeated point inside a cycle: {token!r}")
    return [x - 1 for x in pts]


def _cycles_to_perm(cycles: list[list[int]], degree: int) -> tuple[int, ...]:
    images = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a] = b
    return tuple(images)


def parse_generators(text: str, degree: int | None = None) -> tuple[int, list[tuple[int, ...]]]:
    """Parse generator strings in cycle notation.

    Top-level commas separate generators.  Juxtaposed cycles multiply into a
    single permutation while they stay pairwise disjoint; a cycle overlapping
    the current run starts a new generator, so ``"(1,2,3)(3,4,5)"`` yields the
    two generators (1,2,3) and (3,4,5).
    """
    groups: list[list[list[int]]] = []
    current: list[list[int]] = []
    used: set[int] = set()
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == ",":
            if not current:
                raise PermError(f"stray comma at position {pos} in {text!r}")
            groups.append(current)
            current, used = [], set()
            pos += 1
            continue
        if ch == "(":
            m = _CYCLE_RE.match(text, pos)
            if not m:
                raise PermError(f"malformed cycle at position {pos} in {text!r}")
            pts = _cycle_points(m.group(0))
            if used & set(pts):
                groups.append(current)
                current, used = [], set()
            current.append(pts)
            used |= set(pts)
            pos = m.end()
            continue
        raise PermError(f"unexpected character {ch!r} at position {pos} in {text!r}")
    if current:
        groups.append(current)
    if not groups:
        raise PermError(f"no cycles found in {text!r}")
    max_pt = max((x for grp in groups for cyc in grp for x in cyc), default=-1)
    if degree is None:
        degree = max_pt + 1
    elif max_pt >= degree:
        raise PermError(f"point {max_pt + 1} exceeds degree {degree}")
    return degree, [_cycles_to_perm(grp, degree) for grp in groups]


def format_perm(p: tuple[int, ...]) -> str:
    """Disjoint-cycle string for ``p``, 1-indexed; identity prints as ``()``."""
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j + 1)
            j = p[j]
        out.append("(" + ",".join(str(x) for x in cyc) + ")")
    return "".join(out) if out else "()"
