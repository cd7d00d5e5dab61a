"""Command-line driver: ``bkcheck <command> [options]``.

Every command runs per root-system type, collects records and one summary
per type, sorts them and writes JSON lines (or a short table).  Exit status
is 0 when nothing was violated, 2 on bad input, 3 when a resource budget is
exceeded and 4 when some checked statement failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import __version__
from .cache import Cache, cached_calculus, cached_group
from .errors import BKCheckError, ResourceError, ValidationError
from .rootsys import build_root_system

FORMAT_VERSION = 1
LARGE_GROUP = 5000

log = logging.getLogger("bkcheck")


@dataclass
class RunConfig:
    command: str
    types: list[str]
    seed: int = 0
    samples: int | None = None
    jobs: int = 1
    cache_dir: str | None = None
    use_cache: bool = True
    fmt: str = "json-lines"
    figures: str | None = None
    allow_large: bool = False
    posets: int = 50

    def cache(self) -> Cache | None:
        return Cache(self.cache_dir) if self.use_cache else None


@dataclass
class TypeReport:
    type: str
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violations: int = 0


def types_up_to(rank: int) -> list[str]:
    out = [f"A{n}" for n in range(1, rank + 1)]
    out += [f"B{n}" for n in range(2, rank + 1)]
    out += [f"C{n}" for n in range(3, rank + 1)]
    out += [f"D{n}" for n in range(4, rank + 1)]
    out += [f"E{n}" for n in range(6, min(rank, 8) + 1)]
    if rank >= 4:
        out.append("F4")
    if rank >= 2:
        out.append("G2")
    return out


# -- per-type tasks ------------------------------------------------------------------


def _group(cfg: RunConfig, label: str):
    from .weyl import classical_order

    # gate on the closed-form order so oversized groups are never enumerated by accident
    n = classical_order(build_root_system(label))
    if n > LARGE_GROUP and not (cfg.allow_large or cfg.samples):
        raise ResourceError(f"{label}: |W| = {n}; pass --samples or --allow-large")
    return cached_group(label, cfg.cache())


def _triples(cfg: RunConfig, G):
    from .bkverify import enumerate_bk_triples, sample_triples

    if cfg.samples:
        return sample_triples(G, cfg.samples, cfg.seed)
    return list(enumerate_bk_triples(G))


def task_roots(cfg, label):
    R = build_root_system(label)
    rep = TypeReport(R.label)
    for k in range(R.n_pos):
        rep.records.append({"kind": "root", "index": k, "coords": list(R.coords[k]),
                            "height": R.heights[k]})
    rep.summary = {"rank": R.rank, "positive_roots": R.n_pos,
                   "highest_roots": [list(R.coords[k]) for k in R.highest_roots]}
    return rep


def task_weyl(cfg, label):
    G = _group(cfg, label)
    rep = TypeReport(G.R.label)
    rep.summary = {"order": G.order, "positive_roots": G.N, "w0": G.word_str(G.w0),
                   "length_w0": G.length(G.w0),
                   "length_counts": [int((G.lengths == k).sum()) for k in range(G.N + 1)]}
    return rep


def task_bk(cfg, label):
    from .bkverify import enumerate_bk_triples

    G = _group(cfg, label)
    rep = TypeReport(G.R.label)
    n = 0
    for t in enumerate_bk_triples(G):
        n += 1
        rep.records.append({"kind": "bk_triple", "u": G.word_str(t.u), "v": G.word_str(t.v),
                            "w": G.word_str(t.w)})
    rep.summary = {"order": G.order, "triples": n}
    return rep


def task_main(cfg, label):
    G = _group(cfg, label)
    calc = cached_calculus(G, cfg.cache())
    rep = TypeReport(G.R.label)
    res = calc.verify_main(_triples(cfg, G))
    for t, c in res["violations"]:
        rep.records.append({"kind": "violation", "u": G.word_str(t.u), "v": G.word_str(t.v),
                            "w": G.word_str(t.w), "c": str(c)})
    rep.violations = len(res["violations"])
    rep.summary = {"triples": res["triples"], "violations": rep.violations,
                   "all_c_eq_1": rep.violations == 0, "sampled": bool(cfg.samples),
                   "seed": cfg.seed}
    return rep


def _checks(names):
    def task(cfg, label):
        from .bkverify import run_checks

        G = _group(cfg, label)
        rep = TypeReport(G.R.label)
        res = run_checks(G, names, _triples(cfg, G))
        for n in names:
            for t in res["failures"][n]:
                rep.records.append({"kind": "violation", "check": n, "u": G.word_str(t.u),
                                    "v": G.word_str(t.v), "w": G.word_str(t.w)})
        rep.violations = sum(len(v) for v in res["failures"].values())
        rep.summary = {"triples": res["triples"], "sampled": bool(cfg.samples), "seed": cfg.seed,
                       "failures": {n: len(res["failures"][n]) for n in names}}
        return rep
    return task


def task_combi(cfg, label):
    from .irreducible import verify_combi

    G = _group(cfg, label)
    rep = TypeReport(G.R.label)
    res = verify_combi(G)
    for w, x, y, b, g in res["violations"]:
        rep.records.append({"kind": "violation", "w": G.word_str(w), "x": G.word_str(x),
                            "y": G.word_str(y), "beta": list(G.R.coords[b]),
                            "gamma": list(G.R.coords[g])})
    rep.violations = len(res["violations"])
    rep.summary = {"instances": res["instances"], "checked": res["checked"],
                   "violations": rep.violations, "thetax_failures": len(res["thetax_failures"])}
    return rep


def task_rho(cfg, label):
    from .bkverify import verify_rho

    G = _group(cfg, label)
    rep = TypeReport(G.R.label)
    res = verify_rho(G)
    for w, x, y in res["violations"]:
        rep.records.append({"kind": "violation", "w": G.word_str(w), "x": G.word_str(x),
                            "y": G.word_str(y)})
    rep.violations = len(res["violations"])
    rep.summary = {"decompositions": res["decompositions"], "violations": rep.violations}
    return rep


def task_kernel(cfg, label):
    from .ramification import verify_inversions_cover, verify_kernel_nonzero, verify_profiles

    G = _group(cfg, label)
    samples = cfg.samples or 20
    rep = TypeReport(G.R.label)
    res = verify_kernel_nonzero(G, samples, cfg.seed)
    prof = verify_profiles(G)
    cov = verify_inversions_cover(G)
    for key in ("kernel_zero", "kermi_failures", "triangular_failures", "profile_failures"):
        for r in res[key]:
            rep.records.append(dict(r, kind="violation", check=key))
    for v, w, inv in prof["violations"]:
        rep.records.append({"kind": "violation", "check": "profile", "v": G.word_str(v),
                            "w": G.word_str(w), "invariants": inv})
    for w, k in cov["violations"]:
        rep.records.append({"kind": "violation", "check": "inversions_cover",
                            "w": G.word_str(w), "beta": list(G.R.coords[k])})
    rep.violations = len(rep.records)
    rep.summary = {"instances": res["instances"], "matrices": res["matrices"],
                   "samples_per_instance": samples, "seed": cfg.seed,
                   "cases": dict(sorted(res["cases"].items())),
                   "kernel_zero": len(res["kernel_zero"]),
                   "kermi_failures": len(res["kermi_failures"]),
                   "covers": prof["covers"], "profile_violations": len(prof["violations"]),
                   "inversions_cover_violations": len(cov["violations"])}
    if G.R.label == "D4":
        rep.summary["worked_instance"] = _d4_example(cfg.seed)
        if not all(rep.summary["worked_instance"].values()):
            rep.violations += 1
    return rep


def _d4_example(seed: int) -> dict:
    from .chevalley import build_chevalley
    from .ramification import (UnipotentElement, build_M, cover_profile,
                               d4_worked_instance)

    G, v, w = d4_worked_instance()
    A = build_chevalley(G.R)
    g = UnipotentElement.random(A, "d4-example", seed)
    M = build_M(G, v, w, w, G.identity, g, UnipotentElement.identity(A))
    low = G.R.index[(1, 2, 1, 1)]
    p = cover_profile(G, v, w)
    return {"zero_bottom_row": not any(M.row(low)), "kernel_nonzero": M.kernel_dim() > 0,
            "s_eq_1": p.s == 1, "beta0_is_alpha2": p.beta0 == 1,
            "gamma0_is_1111": p.gammas == (G.R.index[(1, 1, 1, 1)],)}


def task_ramification(cfg, label):
    from .ramification import kernel_records

    G = _group(cfg, label)
    rep = TypeReport(G.R.label)
    samples = cfg.samples or 20
    for r in kernel_records(G, samples, cfg.seed):
        r = dict(r, kind="matrix")
        rep.records.append(r)
        if r["kernel_dim"] == 0 or r.get("kermi") is False or r.get("block_triangular") is False:
            rep.violations += 1
    rep.summary = {"matrices": len(rep.records), "samples_per_instance": samples,
                   "seed": cfg.seed, "violations": rep.violations}
    return rep


def task_irreducible(cfg, label):
    from .irreducible import enumerate_irreducible, orbit_key

    R = build_root_system(label)
    rep = TypeReport(R.label)
    main_cond = "rank7" if R.rank == 7 else "gamma+beta"
    conds = ["gamma+beta", "gamma+phi"] + (["rank7"] if R.rank == 7 else [])
    counts = {}
    for c in conds:
        ts = enumerate_irreducible(R, c)
        counts[c] = len(ts)
        counts[c + " up to Aut"] = len({orbit_key(R, t) for t in ts})
        if c == main_cond:
            for t in ts:
                b, f, g = t.coords(R)
                rep.records.append({"kind": "irreducible", "condition": c, "beta": list(b),
                                    "phi": list(f), "gamma": list(g)})
    rep.summary = {"count": counts[main_cond], "condition": main_cond, "counts": counts}
    return rep


def task_mobius(cfg, label):
    from .posetdet import mobius_selftest

    posets = cfg.samples or cfg.posets
    res = mobius_selftest(posets, cfg.seed)
    rep = TypeReport("posets")
    rep.summary = res
    rep.violations = 0 if res["ok"] else 1
    return rep


TASKS: dict[str, Callable] = {
    "roots": task_roots,
    "weyl": task_weyl,
    "bk enumerate": task_bk,
    "verify main": task_main,
    "verify combi": task_combi,
    "verify descents": _checks(("length", "partition", "descents", "question")),
    "verify bruhat": _checks(("bruhat",)),
    "verify rho": task_rho,
    "verify faces": _checks(("face",)),
    "verify kernel": task_kernel,
    "verify mobius": task_mobius,
    "irreducible": task_irreducible,
    "ramification": task_ramification,
    "mobius-selftest": task_mobius,
}

NO_TYPE = {"verify mobius", "mobius-selftest"}


def _run_one(args):
    cfg, label = args
    return TASKS[cfg.command](cfg, label)


def run(cfg: RunConfig) -> list[TypeReport]:
    labels = ["-"] if cfg.command in NO_TYPE else cfg.types
    if not labels:
        raise ValidationError("no root system selected; use --type or --max-rank")
    for lab in labels:
        if lab != "-":
            build_root_system(lab)
    work = [(cfg, lab) for lab in labels]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            reports = list(ex.map(_run_one, work))
    else:
        reports = [_run_one(w) for w in work]
    return reports


# -- output ---------------------------------------------------------------------------


def emit(cfg: RunConfig, reports: list[TypeReport], out) -> None:
    if cfg.fmt == "json-lines":
        for rep in reports:
            for rec in rep.records:
                line = dict(rec, format_version=FORMAT_VERSION, command=cfg.command, type=rep.type)
                out.write(json.dumps(line, sort_keys=True) + "\n")
            line = {"format_version": FORMAT_VERSION, "command": cfg.command, "type": rep.type,
                    "kind": "summary", "seed": cfg.seed, "violations": rep.violations,
                    **rep.summary}
            out.write(json.dumps(line, sort_keys=True, default=str) + "\n")
    else:
        for rep in reports:
            items = ", ".join(f"{k}: {_fmt(v)}" for k, v in rep.summary.items())
            status = "ok" if rep.violations == 0 else f"{rep.violations} violations"
            out.write(f"{rep.type:<6} [{status}] {items}\n")


def _fmt(v):
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={_fmt(x)}" for k, x in v.items()) + "}"
    return str(v)


def render_figures(cfg: RunConfig, reports: list[TypeReport]) -> list[Path]:
    from . import plots

    d = Path(cfg.figures)
    slug = cfg.command.replace(" ", "-")
    out = []
    if cfg.command == "roots":
        out.append(plots.bar_counts({r.type: r.summary["positive_roots"] for r in reports},
                                    "positive roots", "roots", d / f"{slug}.png"))
    elif cfg.command == "weyl":
        for r in reports:
            counts = r.summary["length_counts"]
            lengths = [k for k, c in enumerate(counts) for _ in range(c)]
            out.append(plots.length_distribution(r.type, lengths, d / f"{slug}-{r.type}.png"))
    elif cfg.command == "bk enumerate":
        out.append(plots.bar_counts({r.type: r.summary["triples"] for r in reports},
                                    "BK triples", "triples", d / f"{slug}.png", log=True))
    elif cfg.command == "irreducible":
        out.append(plots.bar_counts({r.type: r.summary["count"] for r in reports},
                                    "irreducible triples", "count", d / f"{slug}.png"))
    elif cfg.command == "ramification":
        recs = [x for r in reports for x in r.records]
        if recs:
            out.append(plots.kernel_dimensions(recs, d / f"{slug}.png"))
    elif cfg.command in ("verify main", "verify descents", "verify bruhat", "verify faces"):
        rows = {}
        for r in reports:
            n = r.summary["triples"]
            fails = r.summary.get("failures", {"c=1": r.summary.get("violations", 0)})
            rows[r.type] = {k: (v, n) for k, v in fails.items()}
        out.append(plots.check_matrix(rows, d / f"{slug}.png"))
    elif cfg.command in ("verify combi", "verify rho", "verify kernel"):
        key = {"verify combi": "checked", "verify rho": "decompositions",
               "verify kernel": "matrices"}[cfg.command]
        out.append(plots.bar_counts({r.type: r.summary[key] for r in reports},
                                    f"{cfg.command}: {key}", key, d / f"{slug}.png", log=True))
    return out


# -- argument parsing ----------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--type", action="append", default=[],
                   help="root system type such as B3 or A1xA2; repeat or comma-separate")
    p.add_argument("--max-rank", type=int, help="all irreducible types up to this rank")
    p.add_argument("--seed", type=int, help="PRNG seed (default 0; 7 for mobius-selftest)")
    p.add_argument("--samples", type=int, help="sample size (per instance where relevant)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes across types")
    p.add_argument("--cache-dir", help="cache directory (overrides $BKCHECK_CACHE_DIR)")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--format", choices=("json-lines", "summary"), default="json-lines")
    p.add_argument("--figures", metavar="DIR", help="write report figures (PNG) to DIR")
    p.add_argument("--allow-large", action="store_true",
                   help="exhaustive runs on groups with more than 5000 elements")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="bkcheck", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("roots", parents=[common], help="positive roots")
    sub.add_parser("weyl", parents=[common], help="Weyl group statistics")
    bk = sub.add_parser("bk", help="BK triples")
    bks = bk.add_subparsers(dest="action", required=True)
    bks.add_parser("enumerate", parents=[common])
    ver = sub.add_parser("verify", help="run a verification suite")
    vs = ver.add_subparsers(dest="action", required=True)
    for name in ("main", "combi", "descents", "bruhat", "rho", "faces", "kernel", "mobius"):
        vs.add_parser(name, parents=[common])
    sub.add_parser("irreducible", parents=[common], help="irreducible triples")
    sub.add_parser("ramification", parents=[common], help="matrices M with kernel data")
    ms = sub.add_parser("mobius-selftest", parents=[common], help="Möbius determinant self-test")
    ms.add_argument("--posets", type=int, default=50)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    command = ns.command if not getattr(ns, "action", None) else f"{ns.command} {ns.action}"
    types = [t.strip() for arg in ns.type for t in arg.split(",") if t.strip()]
    if ns.max_rank is not None:
        if ns.max_rank < 1:
            raise ValidationError("--max-rank must be positive")
        types += [t for t in types_up_to(ns.max_rank) if t not in types]
    if ns.jobs < 1:
        raise ValidationError("--jobs must be at least 1")
    if ns.samples is not None and ns.samples < 1:
        raise ValidationError("--samples must be positive")
    types = list(dict.fromkeys(build_root_system(t).label for t in types))
    seed = ns.seed if ns.seed is not None else (7 if command == "mobius-selftest" else 0)
    return RunConfig(command=command, types=types, seed=seed, samples=ns.samples,
                     jobs=ns.jobs, cache_dir=ns.cache_dir, use_cache=not ns.no_cache,
                     fmt=ns.format, figures=ns.figures, allow_large=ns.allow_large,
                     posets=getattr(ns, "posets", 50))


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        reports = run(cfg)
        # records are produced in canonical order; reports follow the type order
        reports.sort(key=lambda r: cfg.types.index(r.type) if r.type in cfg.types else 0)
        emit(cfg, reports, out)
        if cfg.figures:
            for p in render_figures(cfg, reports):
                log.info("wrote %s", p)
    except BKCheckError as exc:
        print(f"bkcheck: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"bkcheck: {exc}", file=sys.stderr)
        return 3
    return 4 if any(r.violations for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
