"""Command-line front end.

Exit codes: 0 success, 1 the answer is negative (an unstable profile, a
profitable pair move), 2 usage or input error, 3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from .balanced import DegreeSequence, balanced_stats, build_balanced, extremal_sequence, sweep_conditions
from .cost import format_fraction
from .enumeration import find_equilibria
from .equilibrium import DEFAULT_MAX_STEPS, POLICIES, is_nash, random_tree, run_dynamics
from .errors import ParseError, ResourceLimit, TCGError
from .metrics import extremal_average_costs, fr_lower_bound, fr_upper_bound, pos_floor_check, quality_report
from .path_game import (
    PathProfile,
    is_path_nash,
    loads_paths,
    pair_coalition_improving,
    path_equilibrium_search,
)
from .report import FORMATS, emit_report
from .structure import audit
from .tree import loads

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None


def _ns(args) -> list[int]:
    if args.range:
        lo, hi = args.range
        if lo < 1 or hi < lo:
            raise ValueError("--range needs 1 <= LO <= HI")
        return list(range(lo, hi + 1))
    if args.n is None:
        raise ValueError("give --n or --range")
    return [args.n]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "denominator") and not isinstance(obj, int):
        return format_fraction(obj)
    return obj


def _print_json(obj):
    print(json.dumps(_jsonable(obj), indent=2, sort_keys=True))


def _searches(args):
    reports = []
    for n in _ns(args):
        r = find_equilibria(n, jobs=args.jobs, cap=args.enum_cap, engine=args.engine)
        if getattr(args, "audit", False):
            r.audits = [audit(p).to_dict() for _, p in r.equilibria]
        reports.append(r)
    return reports


def cmd_enumerate(args) -> int:
    reports = _searches(args)
    for r in reports:
        codes = " ".join(f"[{c}]" for c, _ in r.equilibria)
        print(f"n={r.n} trees={r.trees_scanned} equilibria={r.count} {codes}".rstrip())
        if r.audits is not None:
            bad = [k for k, a in enumerate(r.audits) if any(e["passed"] is False for e in a.values())]
            print(f"  structure audit: {'all passed' if not bad else f'failures at {bad}'}")
    if args.out:
        for path in emit_report(reports, args.out, args.format):
            print(f"wrote {path}")
    return EXIT_OK


def cmd_report(args) -> int:
    reports = _searches(args)
    for path in emit_report(reports, args.out, args.format):
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    profile = loads(_read(args.profile))
    verdict = is_nash(profile)
    if verdict:
        print("STABLE")
    else:
        w = verdict.witness
        print("UNSTABLE")
        print(f"agent {w.agent} -> node {w.new_choice}: {format_fraction(w.old_cost)} -> {format_fraction(w.new_cost)}")
    if args.audit and profile.is_spanning_tree:
        _print_json(audit(profile).to_dict())
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_dynamics(args) -> int:
    if args.profile:
        starts = [loads(_read(args.profile))] * args.runs
    elif args.n:
        starts = [random_tree(args.n, random.Random(args.seed + k)) for k in range(args.runs)]
    else:
        raise ValueError("give --n or --profile")
    for k, start in enumerate(starts):
        out = run_dynamics(start, policy=args.policy, seed=args.seed + k, max_steps=args.max_steps)
        row = {"run": k, "start": list(start.choice)}
        row.update(out.to_dict())
        print(json.dumps(row, sort_keys=True))
    return EXIT_OK


def cmd_balanced(args) -> int:
    if args.seq:
        seq = DegreeSequence.parse(args.seq)
    elif args.extremal:
        seq = extremal_sequence(args.extremal)
    else:
        raise ValueError("give --seq or --extremal")
    st = balanced_stats(seq)
    print(f"sequence {seq} height={seq.height} n={st.agents} SC={st.sc_h} admissible={seq.admissible_for_theorem}")
    if args.stats:
        _print_json(
            {
                "sizes": list(st.sizes),
                "subtree_sc": list(st.subtree_sc),
                "agents": st.agents,
                "sc": st.sc_h,
                "average_cost": st.a_h,
            }
        )
    status = EXIT_OK
    if args.verify or args.sweep:
        profile = build_balanced(seq, args.build_cap)
        if args.verify:
            verdict = is_nash(profile)
            print(f"{'STABLE' if verdict else 'UNSTABLE'} n={st.agents} SC={st.sc_h}")
            if not verdict:
                w = verdict.witness
                print(f"agent {w.agent} -> node {w.new_choice}: {format_fraction(w.old_cost)} -> {format_fraction(w.new_cost)}")
                status = EXIT_NEGATIVE
        if args.sweep:
            _print_json({k: t.to_dict() for k, t in sweep_conditions(profile).items()})
    return status


def cmd_metrics(args) -> int:
    if args.extremal:
        for h, a in enumerate(extremal_average_costs(args.extremal), start=1):
            print(f"a_{h} = {format_fraction(a)} ~ {float(a):.7f}")
        return EXIT_OK
    for r in _searches(args):
        q = quality_report(r).to_dict()
        lo, hi = fr_lower_bound(r.n), fr_upper_bound(r.n)
        q["fr_bound_intervals"] = {"lower": [float(lo.a), float(lo.b)], "upper": [float(hi.a), float(hi.b)]}
        q["pos_floor"] = pos_floor_check(r.n, r.best_sc)
        _print_json(q)
    return EXIT_OK


def cmd_path_verify(args) -> int:
    if args.paths:
        pp = loads_paths(_read(args.paths))
    elif args.profile:
        pp = PathProfile.from_tree(loads(_read(args.profile)))
    else:
        raise ValueError("give --profile or --paths")
    if args.pair:
        i, j = args.pair
        if not (0 <= i < pp.n and 0 <= j < pp.n):
            raise ValueError("pair agents out of range")
        dev = pair_coalition_improving(pp, i, j, cap=args.path_cap)
        if dev is None:
            print("NO PAIR DEVIATION")
            return EXIT_OK
        print("PAIR DEVIATION")
        for a, p, old, new in zip(dev.agents, dev.new_paths, dev.old_costs, dev.new_costs):
            print(f"agent {a} via {list(p)}: {format_fraction(old)} -> {format_fraction(new)}")
        return EXIT_NEGATIVE
    verdict = is_path_nash(pp, cap=args.path_cap)
    if verdict:
        print("STABLE")
        return EXIT_OK
    w = verdict.witness
    print("UNSTABLE")
    print(f"agent {w.agent} via {list(w.new_path)}: {format_fraction(w.old_cost)} -> {format_fraction(w.new_cost)}")
    return EXIT_NEGATIVE


def cmd_path_search(args) -> int:
    r = path_equilibrium_search(args.n, jobs=args.jobs, cap=args.path_cap)
    print(f"n={r.n} trees={r.trees_scanned} candidates={r.candidates} stable={len(r.stable)}")
    for code in r.stable:
        print(f"  [{code}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    env_int = lambda name: int(os.environ[name]) if name in os.environ else None  # noqa: E731
    parser = argparse.ArgumentParser(prog="tcg", description="Fair tree connection game toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def search_opts(p):
        p.add_argument("--n", type=int)
        p.add_argument("--range", type=int, nargs=2, metavar=("LO", "HI"))
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--engine", choices=("kernel", "python"), default="kernel")
        p.add_argument("--enum-cap", type=int, default=env_int("TCG_ENUM_CAP"), help="largest n to enumerate (default 20)")

    def output_opts(p, required):
        p.add_argument("--out", required=required, help="output directory")
        p.add_argument("--format", nargs="+", choices=FORMATS, default=list(FORMATS))

    p = sub.add_parser("enumerate", help="find every stable tree for n agents")
    search_opts(p)
    output_opts(p, required=False)
    p.add_argument("--audit", action="store_true", help="run the structural checks on each equilibrium")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("report", help="write JSON/CSV/DOT files for a range of n")
    search_opts(p)
    output_opts(p, required=True)
    p.add_argument("--audit", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", help="check one profile for stability")
    p.add_argument("--profile", required=True, help="JSON array: chosen node per agent")
    p.add_argument("--audit", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dynamics", help="run best-response dynamics")
    p.add_argument("--n", type=int)
    p.add_argument("--profile")
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=POLICIES, default="round-robin")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("balanced", help="balanced trees from a degree sequence")
    p.add_argument("--seq", help="in-degrees leaf-to-root, e.g. 0,1,2,4,9")
    p.add_argument("--extremal", type=int, metavar="H")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--sweep", action="store_true", help="evaluate the swap conditions at every position")
    p.add_argument("--build-cap", type=int, default=env_int("TCG_BUILD_CAP"))
    p.set_defaults(func=cmd_balanced)

    p = sub.add_parser("metrics", help="efficiency and fairness figures")
    search_opts(p)
    p.add_argument("--extremal", type=int, metavar="H", help="print a_1..a_H instead")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("path-verify", help="stability in the path variant")
    p.add_argument("--profile", help="tree profile; agents route along it")
    p.add_argument("--paths", help='JSON {"paths": [[agent node, ..., 0], ...]}')
    p.add_argument("--pair", type=int, nargs=2, metavar=("I", "J"), help="search joint moves of two agents")
    p.add_argument("--path-cap", type=int, default=None)
    p.set_defaults(func=cmd_path_verify)

    p = sub.add_parser("path-search", help="tree shapes stable in the path variant")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--path-cap", type=int, default=None, help="largest n to scan (default 18)")
    p.set_defaults(func=cmd_path_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    for cap in ("enum_cap", "build_cap", "path_cap"):
        value = getattr(args, cap, None)
        if value is not None and value < 1:
            parser.print_usage(sys.stderr)
            print(f"tcg: --{cap.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    if getattr(args, "jobs", 1) < 1:
        print("tcg: --jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"tcg: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ParseError, TCGError, ValueError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"tcg: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
