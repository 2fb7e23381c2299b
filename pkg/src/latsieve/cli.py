"""``latsieve analyze|classify|validate|congruences``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .catalog_io import default_cache_dir, lattice_cache, read_input
from .errors import ClosureTooLarge, LatsieveError, LatticeTooLarge, ParseError, UnknownPattern
from .group_core import DEFAULT_ORDER_CAP, DEFAULT_SUBGROUP_CAP
from .harness import REPORT_SCHEMA, describe_type, render_report, run_validate
from .lattice_core import PATTERN_NAMES, build_lattice, enumerate_congruences, named_pattern
from .pattern_detect import ABSENT, TIMEOUT, DEFAULT_BUDGET_SECS, freeness_profile
from .structure_classify import class_l_membership

EXIT_CAPS = 2
EXIT_PARSE = 3
EXIT_INCONCLUSIVE = 4


def _patterns(text: str | None) -> list[str]:
    if not text:
        return list(PATTERN_NAMES)
    names = [t.strip() for t in text.split(",") if t.strip()]
    for n in names:
        named_pattern(n)
    return names


def _lattice(args, g):
    if args.no_cache:
        return build_lattice(g, max_subgroups=args.max_subgroups)
    store = args.cache_dir or default_cache_dir()
    return lattice_cache(store, g, max_subgroups=args.max_subgroups)


def _load(args):
    return read_input(args.input, max_order=args.max_order)


def cmd_analyze(args) -> int:
    g = _load(args)
    lat = _lattice(args, g)
    prof = freeness_profile(lat, _patterns(args.patterns), args.budget_secs)
    if args.json:
        out = {"schema": REPORT_SCHEMA, "group": args.input, "order": g.order,
               "subgroups": lat.size, "modular": prof.modular, "patterns": {}}
        for name, res in prof.results.items():
            if res is ABSENT or res is TIMEOUT:
                out["patterns"][name] = {"status": "FREE" if res is ABSENT else "TIMEOUT"}
            else:
                out["patterns"][name] = {
                    "status": "WITNESS",
                    "nodes": dict(res.as_dict()),
                    "orders": dict(zip(res.pattern.element_names, res.orders())),
                }
        if not args.stable:
            out["timings"] = prof.timings
        print(json.dumps(out, indent=2, sort_keys=True))
        return 0
    print(f"{args.input}: order {g.order}, {lat.size} subgroups, modular={prof.modular}")
    for name, res in prof.results.items():
        if res is ABSENT:
            print(f"  {name}: FREE")
        elif res is TIMEOUT:
            print(f"  {name}: TIMEOUT after {args.budget_secs} s")
        else:
            parts = [f"{e}=#{n}(|{e}|={o})" for (e, n), o in zip(res.as_dict().items(), res.orders())]
            print(f"  {name}: WITNESS " + " ".join(parts))
    return 0


def cmd_classify(args) -> int:
    g = _load(args)
    lat = _lattice(args, g)
    w = class_l_membership(g, lat.nodes)
    if args.json:
        out = {"schema": REPORT_SCHEMA, "group": args.input, "order": g.order,
               "verdict": w.verdict, "type": describe_type(w), "reasons": [] if w.in_class else w.reasons()}
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"{args.input}: {w.verdict}")
        if w.in_class:
            t = describe_type(w)
            print(f"  type: N of order {t['N']}, K of order {t['K']} = {' x '.join(t['battens']) or '1'}")
            for a in t["avoidance"]:
                print(f"  avoidance {a}")
        else:
            for r in w.reasons() or ["no normal nilpotent Hall subgroup with modular Sylow subgroups"]:
                print(f"  {r}")
    return {"IN_CLASS": 0, "NOT_IN_CLASS": 1}.get(w.verdict, EXIT_INCONCLUSIVE)


def cmd_validate(args) -> int:
    rep = run_validate(args.corpus, jobs=args.jobs, model_path=args.model)
    text = rep.to_json(stable=args.stable)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print(render_report(rep))
    if not rep.ok:
        print(f"validation failed: {rep.first_failure()}", file=sys.stderr)
        return 1
    return 0


def cmd_congruences(args) -> int:
    p = named_pattern(args.pattern)
    congs = enumerate_congruences(p)
    bad = 0
    print(f"{p.name}: {len(congs)} congruences")
    for c in congs:
        classes = " ".join("{" + ",".join(cls) + "}" for cls in c.named_classes())
        note = ""
        if args.pattern == "L9" and not c.is_equality():
            if not c.same("E", "D"):
                bad += 1
                note = "  <- E and D separated"
        print(f"  {classes}{note}")
    if args.pattern == "L9":
        print("every non-equality congruence identifies E and D" if not bad else f"{bad} congruences separate E and D")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latsieve", description="Subgroup lattice pattern search and class tests.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--stable", action="store_true", help="omit or zero timings")
    common.add_argument("--cache-dir", default=None, help="lattice cache directory")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the lattice cache")
    common.add_argument("--max-order", type=int, default=DEFAULT_ORDER_CAP)
    common.add_argument("--max-subgroups", type=int, default=DEFAULT_SUBGROUP_CAP)
    common.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET_SECS)
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="pattern freeness profile")
    a.add_argument("input", help="builtin:<id> or a group file")
    a.add_argument("--patterns", default=None, help="comma-separated, default all")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", parents=[common], help="decide class membership")
    c.add_argument("input")
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("validate", parents=[common], help="run both deciders over the corpus")
    v.add_argument("--corpus", default="all", help="all, tag:<tag>, or comma-separated ids")
    v.add_argument("-j", "--jobs", type=int, default=os.cpu_count() or 1)
    v.add_argument("--report", default=None, help="write the JSON report here")
    v.add_argument("--model", default=None, help="model file for the linear FL4 check")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("congruences", help="congruences of a named pattern")
    g.add_argument("--pattern", default="L9")
    g.set_defaults(func=cmd_congruences)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ClosureTooLarge, LatticeTooLarge) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPS
    except UnknownPattern as exc:
        print(f"unknown pattern: {exc}", file=sys.stderr)
        return 2
    except (KeyError, FileNotFoundError) as exc:
        print(f"no such input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LatsieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
