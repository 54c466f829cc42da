"""Command-line interface: batch computations, verification, and
reproduction of the published reference tables.

Exit codes: 0 success, 1 verification failure, 2 parse/config error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .api import (
    bc,
    bc_prime,
    calculus,
    cd,
    class_order,
    filtration,
    filtration_surjective,
    formal_sum_from_dict,
    formal_sum_to_dict,
    group_display,
    product,
    product_prime_abelian,
    restrict,
    subgroup_of,
    symbol_to_dict,
    verify_main,
)
from .cache import ResultCache
from .groups import GroupError, catalog_group, parse_group
from .perms import PermError
from .symbols import FormalSum
from .zlattice import (
    AbelianInvariants,
    lattice_membership,
    order_in_cokernel,
    smith_normal_form,
)

DESK_ORDER_CAP = 1000
DESK_N_CAP = 4

FLAVOR_INTERNAL = {"bc": "BC", "bc-prime": "BCP"}

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


class CommandError(Exception):
    """Error with a CLI exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# -- plumbing ---------------------------------------------------------------------


def resolve_group(spec: str):
    try:
        if spec.lstrip().startswith("("):
            return parse_group(spec)
        return catalog_group(spec)
    except (GroupError, PermError) as exc:
        raise CommandError(2, f"bad group spec {spec!r}: {exc}") from exc


def check_tier(args, G, n: int | None = None) -> None:
    if args.tier == "desk":
        if G.order > DESK_ORDER_CAP:
            raise CommandError(
                3,
                f"group order {G.order} exceeds the desk tier cap "
                f"({DESK_ORDER_CAP}); rerun with --tier stretch",
            )
        if n is not None and n > DESK_N_CAP:
            raise CommandError(
                3,
                f"n={n} exceeds the desk tier cap ({DESK_N_CAP}); "
                "rerun with --tier stretch",
            )
    else:
        print(
            "warning: stretch tier selected; large computations may take "
            "a long time",
            file=sys.stderr,
        )


def load_sum_arg(G, text: str):
    """Formal sum from inline JSON or @path."""
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise CommandError(2, f"cannot read {text[1:]}: {exc}") from exc
    else:
        raw = text
    try:
        d = json.loads(raw)
    except ValueError as exc:
        raise CommandError(2, f"bad formal sum JSON: {exc}") from exc
    try:
        return formal_sum_from_dict(G, d), d
    except (GroupError, PermError, KeyError, TypeError, ValueError) as exc:
        raise CommandError(2, f"bad formal sum: {exc}") from exc


def emit(args, text_lines, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def cache_for(args):
    return ResultCache(args.cache) if args.cache else None


def invariants_payload(spec: str, n: int, flavor: str, total, summands) -> dict:
    return {
        "group": spec,
        "n": n,
        "flavor": flavor,
        "free_rank": total.free_rank,
        "torsion": list(total.torsion),
        "primary_display": total.primary_display(),
        "summands": summands,
    }


def summand_entries(report) -> list:
    out = []
    for s in report.summands:
        out.append(
            {
                "h_order": s.h_order,
                "y_order": s.y_order,
                "orbit_size": s.orbit_size,
                "free_rank": s.invariants.free_rank,
                "torsion": list(s.invariants.torsion),
                "primary_display": s.invariants.primary_display(),
            }
        )
    return out


def format_sum(G, fs) -> str:
    if not list(fs.items()):
        return "0"
    parts = []
    for sym, c in fs.items():
        d = symbol_to_dict(G, sym)
        h = ",".join(d["h_gens"])
        y = ",".join(d["y_gens"])
        beta = ",".join("(" + ",".join(str(v) for v in b) + ")" for b in d["beta"])
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {mag}[H=<{h}> Y=<{y}> beta={beta}]")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


# -- subcommands ------------------------------------------------------------------


def cmd_compute(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G, args.n)
    cache = cache_for(args)
    key = {
        "kind": "compute",
        "group": args.group,
        "degree": G.degree,
        "order": G.order,
        "n": args.n,
        "flavor": args.flavor,
    }
    payload = cache.get(key) if cache else None
    if payload is None:
        if args.flavor == "bc":
            total = bc(G, args.n)
            payload = invariants_payload(args.group, args.n, "bc", total, [])
        else:
            report = bc_prime(G, args.n)
            payload = invariants_payload(
                args.group, args.n, "bc-prime", report.total, summand_entries(report)
            )
        if cache:
            cache.put(key, payload)
    emit(args, [payload["primary_display"]], payload)
    return 0


def cmd_decompose(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G, args.n)
    cache = cache_for(args)
    key = {
        "kind": "decompose",
        "group": args.group,
        "degree": G.degree,
        "order": G.order,
        "n": args.n,
        "flavor": "bc-prime",
    }
    payload = cache.get(key) if cache else None
    if payload is None:
        report = bc_prime(G, args.n)
        payload = invariants_payload(
            args.group, args.n, "bc-prime", report.total, summand_entries(report)
        )
        if cache:
            cache.put(key, payload)
    lines = []
    for s in payload["summands"]:
        if s["free_rank"] == 0 and not s["torsion"]:
            continue
        lines.append(
            f"[h_order={s['h_order']} y_order={s['y_order']} "
            f"orbit={s['orbit_size']}]  {s['primary_display']}"
        )
    lines.append(f"total: {payload['primary_display']}")
    emit(args, lines, payload)
    return 0


def cmd_verify(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G, args.n)
    report = verify_main(G, args.n)
    checks = [
        ("relations map forward", report.relations_forward),
        ("relations map backward", report.relations_backward),
        ("inverse identities hold", report.inverse_identity),
        ("isomorphic invariants", report.iso),
    ]
    lines = [f"{'ok' if v else 'FAIL'}  {name}" for name, v in checks]
    lines.append(
        f"verify {args.group} n={args.n}: {'PASS' if report.ok else 'FAIL'}"
    )
    payload = {
        "group": args.group,
        "n": args.n,
        "ok": report.ok,
        "relations_forward": report.relations_forward,
        "relations_backward": report.relations_backward,
        "inverse_identity": report.inverse_identity,
        "iso": report.iso,
        "invariants": report.invariants.to_dict(),
        "invariants_primed": report.invariants_primed.to_dict(),
        "decomposition_total": report.decomposition_total.to_dict(),
    }
    emit(args, lines, payload)
    return 0 if report.ok else 1


def cmd_restrict(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G)
    try:
        Gp = subgroup_of(G, args.subgroup)
    except (GroupError, PermError) as exc:
        raise CommandError(2, f"bad subgroup: {exc}") from exc
    fs, d = load_sum_arg(G, args.sum)
    n = args.n if args.n is not None else d.get("n")
    if n is None:
        raise CommandError(2, "supply --n or an 'n' field in the sum")
    check_tier(args, G, n)
    image = restrict(G, Gp, fs, n)
    payload = formal_sum_to_dict(Gp, n, image)
    emit(args, [format_sum(Gp, image)], payload)
    return 0


def cmd_product(args) -> int:
    G = resolve_group(args.group)
    fsx, dx = load_sum_arg(G, args.sum_a)
    fsy, dy = load_sum_arg(G, args.sum_b)
    n = args.n if args.n is not None else dx.get("n")
    m = args.m if args.m is not None else dy.get("n")
    if n is None or m is None:
        raise CommandError(2, "supply --n/--m or 'n' fields in both sums")
    check_tier(args, G, max(n, m))
    try:
        if args.flavor == "bc-prime":
            out = product_prime_abelian(G, fsx, fsy)
        else:
            out = product(G, fsx, n, fsy, m)
    except GroupError as exc:
        raise CommandError(2, str(exc)) from exc
    payload = formal_sum_to_dict(G, n + m, out)
    emit(args, [format_sum(G, out)], payload)
    return 0


def cmd_filtration(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G, args.n)
    try:
        total = filtration(G, args.n, args.r)
    except GroupError as exc:
        raise CommandError(2, str(exc)) from exc
    payload = {
        "group": args.group,
        "n": args.n,
        "r": args.r,
        "flavor": "bc",
        "free_rank": total.free_rank,
        "torsion": list(total.torsion),
        "primary_display": total.primary_display(),
    }
    lines = [payload["primary_display"]]
    ok = True
    if args.check_surjective:
        ok = filtration_surjective(G, args.n, args.r)
        payload["surjective"] = ok
        lines.append(f"surjective: {'yes' if ok else 'NO'}")
    emit(args, lines, payload)
    return 0 if ok else 1


def cmd_cd(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G)
    try:
        report = cd(G, coefficients=args.coefficients)
    except GroupError as exc:
        raise CommandError(2, str(exc)) from exc
    payload = report.to_dict()
    payload["group"] = args.group
    lines = [
        f"cd = {report.value} (coefficients {args.coefficients})",
        f"termination bound: {report.bound}",
        f"conjectured log2 bound: {report.conjectured_log2} "
        "(reported, not asserted)",
    ]
    for m, is_zero, method in report.checked:
        state = "zero" if is_zero else "nonzero"
        lines.append(f"  m={m}: {state} ({method})")
    emit(args, lines, payload)
    return 0


def cmd_class_order(args) -> int:
    G = resolve_group(args.group)
    fs, d = load_sum_arg(G, args.sum)
    n = args.n if args.n is not None else d.get("n")
    if n is None:
        raise CommandError(2, "supply --n or an 'n' field in the sum")
    check_tier(args, G, n)
    order = class_order(G, n, fs)
    payload = {"group": args.group, "n": n, "order": order}
    lines = ["infinite order" if order is None else f"order = {order}"]
    emit(args, lines, payload)
    return 0


def cmd_basis(args) -> int:
    G = resolve_group(args.group)
    check_tier(args, G, args.n)
    calc = calculus(G)
    pres = calc.presentation(args.n, FLAVOR_INTERNAL[args.flavor])
    snf = smith_normal_form(pres.matrix())
    ngens = len(pres.generators)
    factors = []
    for k in range(ngens):
        d = snf.diag[k] if k < len(snf.diag) else 0
        if d == 1:
            continue
        rep = FormalSum()
        for j, c in enumerate(snf.vinv[k]):
            if c:
                rep.add(pres.generators[j], c)
        factors.append((d, rep))
    # torsion factors first, then free ones, matching the invariant display
    factors.sort(key=lambda t: (t[0] == 0, t[0]))
    lines = []
    payload_factors = []
    for d, rep in factors:
        label = "Z" if d == 0 else f"Z/{d}"
        lines.append(f"{label}: {format_sum(G, rep)}")
        payload_factors.append(
            {"order": d, "sum": formal_sum_to_dict(G, args.n, rep)}
        )
    total = pres.invariants()
    lines.append(f"total: {total.primary_display()}")
    payload = {
        "group": args.group,
        "n": args.n,
        "flavor": args.flavor,
        "free_rank": total.free_rank,
        "torsion": list(total.torsion),
        "primary_display": total.primary_display(),
        "factors": payload_factors,
    }
    emit(args, lines, payload)
    return 0


# -- examples / reproduce ---------------------------------------------------------


def _load_data(name: str) -> dict:
    path = os.path.join(DATA_DIR, name)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _expected_invariants(cell: dict) -> AbelianInvariants:
    return AbelianInvariants.from_divisors(
        cell.get("free_rank", 0), cell.get("primary", [])
    )


def cmd_examples(args) -> int:
    if args.name != "d6":
        raise CommandError(2, f"unknown example {args.name!r} (available: d6)")
    G = catalog_group("D6")
    lines = []
    report = bc_prime(G, 2)
    lines.append("degree-2 decomposition of the order-12 dihedral group:")
    for s in report.summands:
        if s.invariants.is_trivial:
            continue
        lines.append(
            f"  [h_order={s.h_order} y_order={s.y_order}]  "
            f"{s.invariants.primary_display()}"
        )
    lines.append(f"  total: {report.total.primary_display()}")

    data = _load_data("d6_class.json")
    fs = formal_sum_from_dict(G, data)
    lines.append("shipped class:")
    for sym, c in fs.items():
        one = FormalSum()
        one.add(sym, c)
        lines.append(f"  {format_sum(G, one)}")
    order = class_order(G, 2, fs)
    lines.append(f"class order: {order}")

    ok = order == 2
    image_ok = _check_d6_image(G, fs)
    lines.append(f"psi image matches the two-term reduced class: {image_ok}")
    ok = ok and image_ok

    n3 = bc(G, 3)
    lines.append(f"degree-3 group: {n3.primary_display()}")
    ok = ok and n3.is_trivial

    payload = {
        "example": "d6",
        "total": report.total.to_dict(),
        "class_order": order,
        "image_ok": image_ok,
        "degree3": n3.to_dict(),
        "ok": ok,
    }
    emit(args, lines, payload)
    return 0 if ok else 1


def _check_d6_image(G, fs) -> bool:
    from .symbols import psi_sum

    calc = calculus(G)
    tables = _load_data("tables.json")
    img = psi_sum(calc, fs)
    expected = formal_sum_from_dict(
        G, {"terms": tables["d6"]["expected_image_terms"]}
    )
    pres = calc.presentation(2, "BCP")
    diff = [0] * len(pres.generators)
    for sym, c in img.items():
        diff[pres.index[sym]] += c
    for sym, c in expected.items():
        diff[pres.index[sym]] -= c
    if not lattice_membership(pres.matrix(), diff):
        return False
    evec = [0] * len(pres.generators)
    for sym, c in expected.items():
        evec[pres.index[sym]] += c
    return order_in_cokernel(pres.matrix(), evec) == 2


def _run_cells(args, cells, lines, results) -> bool:
    all_ok = True
    for cell in cells:
        name, n = cell["group"], cell["n"]
        tag = f"{name} n={n}"
        if args.max_n is not None and cell.get("row", n) > args.max_n:
            continue
        if cell.get("tier") == "stretch" and args.tier != "stretch":
            lines.append(f"SKIP {tag} (stretch tier)")
            results.append({"cell": tag, "status": "skip"})
            continue
        G = resolve_group(name)
        expected = _expected_invariants(cell)
        got = bc_prime(G, n).total
        ok = got == expected
        all_ok = all_ok and ok
        state = "PASS" if ok else "FAIL"
        suffix = "" if ok else (
            f" expected {expected.primary_display()}, got {got.primary_display()}"
        )
        lines.append(f"{state} {tag}: {got.primary_display()}{suffix}")
        results.append({"cell": tag, "status": state.lower()})
    return all_ok


def _shape_matches(key: str, s) -> bool:
    parts = [int(v) for v in key.split(",")]
    if len(parts) == 2:
        return (s.h_order, s.y_order) == tuple(parts)
    return s.h_order == parts[0]


def _check_summands(args, checks, lines, results) -> bool:
    all_ok = True
    for chk in checks:
        name, n = chk["group"], chk["n"]
        tag = f"{name} n={n} summands"
        if chk.get("tier") == "stretch" and args.tier != "stretch":
            lines.append(f"SKIP {tag} (stretch tier)")
            continue
        G = resolve_group(name)
        report = bc_prime(G, n)
        nonzero = [s for s in report.summands if not s.invariants.is_trivial]
        ok = True
        covered = 0
        for key, spec in chk["by_shape"].items():
            want = AbelianInvariants.from_divisors(
                spec.get("free_rank", 0), spec.get("primary", [])
            )
            hits = [s for s in nonzero if _shape_matches(key, s)]
            if len(hits) != spec["count"] or any(s.invariants != want for s in hits):
                ok = False
            covered += len(hits)
        # every nonzero summand must be claimed by exactly one listed shape
        if covered != len(nonzero):
            ok = False
        all_ok = all_ok and ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {tag}")
        results.append({"cell": tag, "status": "pass" if ok else "fail"})
    return all_ok


def cmd_reproduce(args) -> int:
    tables = _load_data("tables.json")
    if args.table not in tables:
        raise CommandError(
            2, f"unknown table {args.table!r} (available: {', '.join(sorted(tables))})"
        )
    table = tables[args.table]
    cells = table.get("cells", [])
    if args.p is not None:
        cells = [c for c in cells if c.get("p") == args.p]
        if not cells:
            raise CommandError(2, f"no {args.table} cell with p={args.p}")
    lines, results = [], []
    ok = _run_cells(args, cells, lines, results)
    if args.p is None:
        ok = _check_summands(args, table.get("summand_checks", []), lines, results) and ok
        if args.table == "d6":
            G = catalog_group("D6")
            fs = formal_sum_from_dict(G, _load_data("d6_class.json"))
            order = class_order(G, 2, fs)
            class_ok = order == 2 and _check_d6_image(G, fs)
            lines.append(f"{'PASS' if class_ok else 'FAIL'} d6 class order and image")
            results.append(
                {"cell": "d6 class", "status": "pass" if class_ok else "fail"}
            )
            ok = ok and class_ok
    lines.append("all cells pass" if ok else "some cells FAILED")
    emit(args, lines, {"table": args.table, "ok": ok, "results": results})
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burnside",
        description="Exact symbol-group computations for finite permutation groups.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--cache", metavar="DIR", default=None,
                        help="enable the on-disk result cache in DIR")
    common.add_argument("--tier", choices=("desk", "stretch"), default="desk")
    common.add_argument("--threads", type=int, default=1,
                        help="worker bound; execution is deterministic")

    sub = parser.add_subparsers(dest="command", required=True)

    def group_cmd(name, func, help_text, with_n=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--group", required=True)
        if with_n:
            p.add_argument("--n", type=int, required=True)
        p.set_defaults(func=func)
        return p

    p = group_cmd("compute", cmd_compute, "total invariants of the degree-n group")
    p.add_argument("--flavor", choices=("bc", "bc-prime"), default="bc")

    group_cmd("decompose", cmd_decompose, "per-class direct-sum decomposition")
    group_cmd("verify", cmd_verify, "check the decomposition isomorphism")

    p = group_cmd("restrict", cmd_restrict, "restrict a sum to a subgroup",
                  with_n=False)
    p.add_argument("--subgroup", required=True,
                   help="subgroup generators in cycle notation")
    p.add_argument("--sum", required=True, help="formal sum JSON or @file")
    p.add_argument("--n", type=int, default=None)

    p = group_cmd("product", cmd_product, "product of two formal sums",
                  with_n=False)
    p.add_argument("--sum-a", required=True, help="formal sum JSON or @file")
    p.add_argument("--sum-b", required=True, help="formal sum JSON or @file")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--flavor", choices=("bc", "bc-prime"), default="bc")

    p = group_cmd("filtration", cmd_filtration,
                  "span of classes with few distinct characters")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--check-surjective", action="store_true")

    p = group_cmd("cd", cmd_cd, "least n with all higher degrees zero",
                  with_n=False)
    p.add_argument("--coefficients", default="Z",
                   help="Z, Q, or Fp with p prime (e.g. F2)")

    p = group_cmd("class-order", cmd_class_order,
                  "order of a class in the degree-n group", with_n=False)
    p.add_argument("--sum", required=True, help="formal sum JSON or @file")
    p.add_argument("--n", type=int, default=None)

    p = group_cmd("basis", cmd_basis, "invariant-factor basis with representatives")
    p.add_argument("--flavor", choices=("bc", "bc-prime"), default="bc")

    p = sub.add_parser("examples", parents=[common],
                       help="worked end-to-end example checks")
    p.add_argument("name", nargs="?", default="d6")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("reproduce", parents=[common],
                       help="recompute a published table and diff")
    p.add_argument("table",
                   help="one of: sym, dihedral, heisenberg, cremona, d6")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--p", type=int, default=None,
                   help="restrict the dihedral table to one prime")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if not hasattr(args, "max_n"):
        args.max_n = None
    if not hasattr(args, "p"):
        args.p = None
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GroupError, PermError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
