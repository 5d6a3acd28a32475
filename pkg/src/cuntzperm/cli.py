"""Command-line entry point: ``cuntzperm <verb> ...``.

Permutation arguments are cycle text at the level given by ``-k``, a level
prefix such as ``4:(10,12)``, one of the named permutations (A, B, F, G,
J, Y, Z), or ``@file`` with one permutation per line.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .algebra import DomainError, Perm, convolve, format_cycles, parse_cycles
from .closures import ResourceCapExceeded, diagnose
from .diagonal import diag_table, format_diag_table
from .inverse import MAX_TABLE_ENV, NotStabilized, invert_endo, verify_coupled
from .named import NAMED
from .search import SearchConfig, enumerate_automorphisms, is_inner
from .trees import extract_maps, is_rooted_tree, shape_of, to_dot

EXIT_YES, EXIT_NO, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2, 3


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    seconds: float = 0.0
    digest: str = ""
    extra: dict = field(default_factory=dict)


def _digest(payload) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _perm_args(text: str, n: int, k: int | None) -> list[Perm]:
    if text.startswith("@"):
        lines = Path(text[1:]).read_text().splitlines()
        return [p for ln in lines if ln.strip() and not ln.startswith("#") for p in _perm_args(ln.strip(), n, k)]
    if text in NAMED:
        p = NAMED[text]
        if p.n != n:
            raise DomainError(f"{text} lives over n={p.n}, not n={n}")
        return [p]
    m = re.fullmatch(r"\s*(\d+)\s*:(.*)", text)
    if m:
        return [parse_cycles(m.group(2), n, int(m.group(1)))]
    if k is None:
        raise DomainError(f"level unknown for {text!r}: pass -k or prefix it as 'k:'")
    return [parse_cycles(text, n, k)]


def _one_perm(text: str, n: int, k: int | None) -> Perm:
    ps = _perm_args(text, n, k)
    if len(ps) != 1:
        raise DomainError("expected exactly one permutation")
    return ps[0]


def _emit(args, text: str, payload: dict, manifest: RunManifest):
    manifest.digest = _digest(payload)
    doc = {"result": payload, "manifest": asdict(manifest)}
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text)
    if args.json:
        Path(args.json).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# -------------------------------------------------------------- verbs


def cmd_check(args) -> int:
    ps = _perm_args(args.perm, args.n, args.k)
    code = EXIT_YES
    payloads, texts = [], []
    for p in ps:
        d = diagnose(p, oracle=not args.no_oracle)
        d["perm"] = format_cycles(p)
        d["level"] = p.k
        payloads.append(d)
        texts.append(_check_text(d))
        if not d["automorphism"]:
            code = EXIT_NO
    payload = payloads[0] if len(payloads) == 1 else {"batch": payloads}
    _emit(args, "\n\n".join(texts), payload, RunManifest("check", vars_clean(args)))
    return code


def _check_text(d: dict) -> str:
    lines = [f"permutation {d['perm']} at level {d['level']}"]
    for t in d["trees"]:
        lines.append(f"  f_{t['i']}: {t['shape'] if t['rooted_tree'] else 'not a rooted tree'}")
    sig, psi = d["sigma"], d["psi"]
    lines.append(f"  sigma closure: {'full' if sig['ok'] else 'not full'} (depth {sig['depth']})")
    lines.append(f"  psi closure:   {'full' if psi['ok'] else 'not full'} (depth {psi['depth']})")
    lines.append(f"  diagonal automorphism: {'yes' if d['diag_automorphism'] else 'no'}")
    lines.append(f"  automorphism: {'yes' if d['automorphism'] else 'no'}")
    orc = d.get("oracle")
    if orc:
        lines.append(f"  nilpotency oracle: {orc.get('agrees', orc.get('skipped'))}")
    return "\n".join(lines)


def _search_config(args) -> SearchConfig:
    base = {}
    if args.config:
        cp = configparser.ConfigParser()
        cp.read_string("[run]\n" + Path(args.config).read_text())
        base = dict(cp["run"])
    mode = "full"
    if args.diag_only or base.get("mode") == "diag-only":
        mode = "diag-only"
    if args.square_free or base.get("mode") == "square-free":
        mode = "square-free"
    truthy = lambda v: str(v).lower() in ("1", "true", "yes", "on")
    return SearchConfig(
        n=args.n if args.n is not None else int(base.get("n", 2)),
        k=args.k if args.k is not None else int(base.get("k", 1)),
        mode=mode,
        engine=args.engine or base.get("engine", "auto"),
        workers=args.workers or int(base.get("workers", 1)),
        classes=not args.count_only and not truthy(base.get("count_only", "false")),
        long_run=args.long_run or truthy(base.get("long_run", "false")),
        checkpoint=args.checkpoint or base.get("checkpoint"),
        max_units=args.max_units if args.max_units is not None else (int(base["max_units"]) if "max_units" in base else None),
    )


def cmd_enumerate(args) -> int:
    cfg = _search_config(args)
    t0 = time.perf_counter()
    res = enumerate_automorphisms(cfg)
    rep = res.report
    payload = rep.to_dict()
    lines = [f"n={rep.n} k={rep.k} mode={rep.mode} engine={rep.engine}"]
    label = "diagonal automorphisms" if rep.mode == "diag-only" else "automorphisms"
    lines.append(f"  N = {rep.total} {label}" + ("" if rep.complete else " (INCOMPLETE)"))
    if rep.classes is not None:
        lines.append(f"  C = {rep.classes} inner classes (free action: {rep.free})")
    if rep.square_free is not None:
        lines.append(f"  sf = {rep.square_free}")
    if rep.shape_count is not None:
        lines.append(f"  shapes on {rep.n ** (rep.k - 1)} vertices: {rep.shape_count}")
    for key, c in rep.shape_stats.items():
        lines.append(f"  survivors {key}: {c}")
    for code, a in rep.aut_orders.items():
        lines.append(f"  |Aut {code}| = {a}")
    if rep.orbits and cfg.classes:
        lines.append("  representatives:")
        for o in rep.orbits:
            sf = "" if o.square_free is None else f", square-free {o.square_free}"
            lines.append(f"    {o.representative}  (orbit {o.size}{sf})")
    man = RunManifest("enumerate", asdict(cfg), seconds=round(time.perf_counter() - t0, 3))
    _emit(args, "\n".join(lines), payload, man)
    if args.csv:
        _write_cells_csv(args.csv, {(rep.n, rep.k): rep})
    return EXIT_YES if rep.complete else EXIT_PARTIAL


def cmd_invert(args) -> int:
    p = _one_perm(args.perm, args.n, args.k)
    try:
        res = invert_endo(p, args.cutoff)
    except NotStabilized as e:
        payload = {"perm": format_cycles(p), "level": p.k, "found": False, "cutoff": e.cutoff, "capped": e.capped}
        _emit(args, str(e), payload, RunManifest("invert", vars_clean(args)))
        return EXIT_NO
    inv = res.inverse
    coupled = verify_coupled(p, inv)
    payload = {
        "perm": format_cycles(p),
        "level": p.k,
        "found": True,
        "inverse": format_cycles(inv),
        "inverse_level": inv.k,
        "iterations": res.iterations,
        "coupled_equations": coupled,
    }
    text = f"inverse at level {inv.k}: {format_cycles(inv)}\ncoupled equations hold: {coupled}"
    _emit(args, text, payload, RunManifest("invert", vars_clean(args)))
    return EXIT_YES


def cmd_compose(args) -> int:
    ps = [_one_perm(t, args.n, args.k) for t in args.perms]
    out = ps[0]
    for q in ps[1:]:
        out = convolve(out, q)
    payload = {"level": out.k, "result": format_cycles(out), "identity": out.is_identity()}
    _emit(args, f"{format_cycles(out)}  (level {out.k})", payload, RunManifest("compose", vars_clean(args)))
    return EXIT_YES


def cmd_trees(args) -> int:
    p = _one_perm(args.perm, args.n, args.k)
    t = extract_maps(p)
    dot = to_dot(t, labels=not args.unlabeled)
    shapes = [shape_of(f).code if is_rooted_tree(f) else None for f in t]
    payload = {"perm": format_cycles(p), "level": p.k, "maps": [f.as_words() for f in t], "shapes": shapes}
    if args.dot:
        Path(args.dot).write_text(dot)
    _emit(args, dot, payload, RunManifest("trees", vars_clean(args)))
    return EXIT_YES


def cmd_diagonal(args) -> int:
    ps = [(t, _one_perm(t, args.n, args.k)) for t in args.perms]
    tables = {name: diag_table(p, args.max_len) for name, p in ps}
    payload = {name: tab.as_dict() for name, tab in tables.items()}
    trunc = any(t.truncated for t in tables.values())
    text = format_diag_table(tables) + ("\n(truncated by table budget)" if trunc else "")
    _emit(args, text, payload, RunManifest("diagonal", vars_clean(args)))
    return EXIT_PARTIAL if trunc else EXIT_YES


def cmd_is_inner(args) -> int:
    p = _one_perm(args.perm, args.n, args.k)
    v = is_inner(p)
    word_ = {True: "inner", False: "outer", None: "unknown"}[v]
    payload = {"perm": format_cycles(p), "level": p.k, "inner": v}
    _emit(args, word_, payload, RunManifest("is-inner", vars_clean(args)))
    return {True: EXIT_YES, False: EXIT_NO, None: EXIT_PARTIAL}[v]


DESK_CELLS = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (4, 1)]


def _write_cells_csv(path: str | None, cells: dict) -> str:
    ns = sorted({n for n, _ in cells} | {2, 3, 4})
    ks = sorted({k for _, k in cells} | {1, 2, 3, 4})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for title, attr in (("N", "total"), ("C", "classes"), ("sf", "square_free")):
        w.writerow([title] + [f"n={n}" for n in ns])
        for k in ks:
            row = [f"k={k}"]
            for n in ns:
                rep = cells.get((n, k))
                val = None if rep is None else getattr(rep, attr)
                row.append("" if val is None else val)
            w.writerow(row)
        w.writerow([])
    text = buf.getvalue()
    if path:
        Path(path).write_text(text)
    return text


def cmd_tables(args) -> int:
    todo = list(DESK_CELLS)
    if args.long_run:
        todo.append((4, 2))
    cells = {}
    t0 = time.perf_counter()
    for n, k in todo:
        cfg = SearchConfig(n, k, mode="square-free", long_run=args.long_run, workers=args.workers or 1)
        cells[(n, k)] = enumerate_automorphisms(cfg).report
    text = _write_cells_csv(args.csv, cells)
    payload = {
        f"{n},{k}": {"N": r.total, "C": r.classes, "sf": r.square_free} for (n, k), r in sorted(cells.items())
    }
    _emit(args, text.rstrip(), payload, RunManifest("tables", vars_clean(args), seconds=round(time.perf_counter() - t0, 3)))
    return EXIT_YES


def vars_clean(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


# ------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", type=int, default=None, help="alphabet size (default 2)")
    common.add_argument("-k", type=int, default=None, help="level of cycle-text permutations")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--json", metavar="FILE", help="also write result and run manifest as JSON")

    ap = argparse.ArgumentParser(
        prog="cuntzperm",
        description=f"Permutative endomorphisms of Cuntz algebras. Memory cap: ${MAX_TABLE_ENV} (table entries).",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("check", parents=[common], help="decide whether lambda_p is an automorphism")
    s.add_argument("perm")
    s.add_argument("--no-oracle", action="store_true", help="skip the nilpotency cross-check")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("enumerate", parents=[common], help="count automorphisms and inner classes")
    s.add_argument("--diag-only", action="store_true")
    s.add_argument("--count-only", action="store_true", help="skip class representatives")
    s.add_argument("--classes", action="store_true", help="list class representatives (default)")
    s.add_argument("--square-free", action="store_true")
    s.add_argument("--engine", choices=("auto", "brute", "pipeline", "both"))
    s.add_argument("--long-run", action="store_true")
    s.add_argument("--workers", type=int)
    s.add_argument("--checkpoint", metavar="FILE", help="resumable per-unit progress log")
    s.add_argument("--max-units", type=int, help="stop after this many work units (partial report)")
    s.add_argument("--config", metavar="FILE", help="key=value run configuration")
    s.add_argument("--csv", metavar="FILE", help="write N/C/sf cells as CSV")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("invert", parents=[common], help="inverse by stabilization")
    s.add_argument("perm")
    s.add_argument("--cutoff", type=int, help="largest inverse level to try")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("compose", parents=[common], help="convolution product, left to right")
    s.add_argument("perms", nargs="+")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("trees", parents=[common], help="tree maps as graph description text")
    s.add_argument("perm")
    s.add_argument("--dot", metavar="FILE")
    s.add_argument("--unlabeled", action="store_true")
    s.set_defaults(func=cmd_trees)

    s = sub.add_parser("diagonal", parents=[common], help="action on diagonal projections")
    s.add_argument("perms", nargs="+")
    s.add_argument("--max-len", type=int, default=3)
    s.set_defaults(func=cmd_diagonal)

    s = sub.add_parser("is-inner", parents=[common], help="is lambda_p inner")
    s.add_argument("perm")
    s.set_defaults(func=cmd_is_inner)

    s = sub.add_parser("tables", parents=[common], help="N, C and sf tables as CSV")
    s.add_argument("--csv", metavar="FILE")
    s.add_argument("--long-run", action="store_true", help="include n=4, k=2")
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_tables)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.verb != "enumerate" and args.n is None:
        args.n = 2
    try:
        return args.func(args)
    except (DomainError, ResourceCapExceeded, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
