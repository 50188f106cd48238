import argparse
import os
import sys
from collections import Counter
from textwrap import fill

import yaml

from semifree_tfd.classifier import (
    PATTERNS,
    check_record,
    classify_all,
    reduced_space_census,
)
from semifree_tfd.dh_engine import critical_value_table
from semifree_tfd.exceptional import exceptional_classes, identify_ruled_basis
from semifree_tfd.io import (
    FixtureParseError,
    InvalidConfigError,
    fixtures_dir,
    format_records,
    list_fixtures,
    load_config,
    load_polytope_fixture,
    load_report_fixture,
)
from semifree_tfd.lattice import SurfaceModel, check_model, format_class
from semifree_tfd.localization import case_iii_solutions, enumerate_profile_solutions
from semifree_tfd.splitting import enumerate_splittings, oracle_splittings
from semifree_tfd.toric import AmbiguousMatchError, balanced_values, match_tfd

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

# number of exceptional classes of CP2 blown up at k points
EXCEPTIONAL_COUNTS = {0: 0, 1: 1, 2: 3, 3: 6, 4: 10, 5: 16, 6: 27, 7: 56, 8: 240}

EXPECTED_C1_CUBED = Counter(
    [64, 48, 56, 48, 48, 40, 54, 44, 34, 36, 36, 36, 40, 38, 38, 42, 42, 46, 50, 46, 50]
)
EXPECTED_B2 = Counter([1, 2, 2, 3, 3, 2, 2, 3, 4, 5, 5, 4, 4, 3, 4, 3, 4, 3, 3, 4, 3])


class _Context:
    """Lazily classified records shared between suites."""

    def __init__(self, config, verbose=False):
        self.config = config
        self.verbose = verbose
        self._records = None
        self.log = []

    @property
    def records(self):
        if self._records is None:
            self._records = classify_all(self.config, log=self.log)
            if self.verbose:
                for rejection in self.log:
                    print(f"  rejected {rejection}", file=sys.stderr)
        return self._records


def check_lattice(ctx):
    problems = []
    models = [SurfaceModel("P2", k) for k in range(9)]
    models += [SurfaceModel("S2xS2", k) for k in range(8)]
    models += [SurfaceModel("Hirzebruch", k) for k in range(8)]
    for m in models:
        problems += check_model(m)
        if m.base != "S2xS2" or m.blowups:
            problems += identify_ruled_basis(m).check()
    for k, expected in EXCEPTIONAL_COUNTS.items():
        found = len(
            exceptional_classes(
                SurfaceModel("P2", k),
                ctx.config["exceptional_degree_bound"],
                ctx.config["exceptional_multiplicity_bound"],
            )
        )
        if found != expected:
            problems.append(f"CP2 # {k}CP2bar has {found} exceptional classes, expected {expected}")
    print(f"lattice: {len(models)} models, exceptional counts for k <= 8")
    return problems


def check_localization(ctx):
    problems = []
    solutions = enumerate_profile_solutions()
    normalized = enumerate_profile_solutions(normalized=True)
    print(f"localization: {len(solutions)} profile solutions / {len(normalized)} normalized")
    if (len(solutions), len(normalized)) != (13, 8):
        problems.append("profile solutions: expected 13 / 8")
    case_iii = case_iii_solutions(ctx.config["case_iii_b_range"], ctx.config["case_iii_m_range"])
    if case_iii != [(1, 1), (0, 2), (-1, 3)]:
        problems.append(f"case III (b_min, m) solutions {case_iii}")
    if len(critical_value_table()) != 9:
        problems.append("critical value table must have nine rows")
    for r in ctx.records:
        problems += check_record(r)
    return problems


def check_splitting(ctx):
    problems = []
    instances = agree = 0
    for r in ctx.records:
        if r.splitting is None:
            continue
        M0, total = r.model0, r.z_total
        vol = r.vol_z0
        found = enumerate_splittings(M0, M0.c1, total, vol, slack=ctx.config["splitting_slack"])
        oracle = oracle_splittings(M0, M0.c1, total, vol, box=ctx.config["oracle_box"])
        instances += 1
        if set(found) == set(oracle):
            agree += 1
        else:
            problems.append(
                f"{r.case_id}: pruned and oracle splittings of "
                f"{format_class(M0, total)} differ ({len(found)} vs {len(oracle)})"
            )
        if r.splitting not in found:
            problems.append(f"{r.case_id}: emitted splitting is not enumerated")
    print(f"splitting: oracle agrees on {agree}/{instances} instances")
    return problems


def _verify_file(path, records):
    """Return (exit code, report lines) for one fixture."""
    lines = [os.path.basename(path)]
    try:
        if path.endswith(".json"):
            summary, expect = load_report_fixture(path)
        else:
            polytope, circle, expect = load_polytope_fixture(path)
            report = balanced_values(polytope, circle)
            summary = report.summary(source=os.path.basename(path))
            lines.append(f"  balanced shift {report.balanced_shift}")
            for c in report.components:
                extra = f", area {c.area}" if c.dim == 2 else ""
                lines.append(f"  level {c.level:+d}: {c.shape}{extra}, weights {c.weights}")
    except (FixtureParseError, ValueError) as err:
        lines.append(f"  error: {err}")
        return EXIT_USAGE, lines
    lines.append(
        f"  b_min {summary.b_min}, b_max {summary.b_max}, m {summary.m}, "
        f"Z0 areas {list(summary.z0_areas)}, b2 {summary.b2}, c1^3 {summary.c1_cubed}"
    )
    try:
        record = match_tfd(summary, records)
    except AmbiguousMatchError as err:
        lines.append(f"  {err}")
        return EXIT_MISMATCH, lines
    lines.append(f"  matched {record.case_id}")
    if expect is not None and expect != record.case_id:
        lines.append(f"  expected {expect}")
        return EXIT_MISMATCH, lines
    return EXIT_OK, lines


def check_toric(ctx, directory=None):
    problems = []
    paths = list_fixtures(directory)
    for path in paths:
        code, lines = _verify_file(path, ctx.records)
        if code != EXIT_OK:
            problems.append("; ".join(line.strip() for line in lines))
    print(f"toric: {len(paths) - len(problems)}/{len(paths)} fixtures matched")
    return problems


def check_classification(ctx):
    records = ctx.records
    problems = reduced_space_census(records)
    if len(records) != 21:
        problems.append(f"classification has {len(records)} records, expected 21")
    if Counter(r.c1_cubed for r in records) != EXPECTED_C1_CUBED:
        problems.append("c1^3 multiset differs from the master table")
    if Counter(r.b2 for r in records) != EXPECTED_B2:
        problems.append("b2 multiset differs from the master table")
    if len({r.key() for r in records}) != len(records):
        problems.append("two records coincide")
    for r in records:
        if r.mori_mukai and int(r.mori_mukai.split("-")[0]) != r.b2:
            problems.append(f"{r.case_id}: Mori-Mukai rank {r.mori_mukai} differs from b2 {r.b2}")
    print(f"classification: {len(records)} records")
    return problems


SUITES = {
    "lattice": check_lattice,
    "localization": check_localization,
    "splitting": check_splitting,
    "toric": check_toric,
}


def cmd_classify(args, ctx):
    cases = PATTERNS if args.case == "all" else (args.case,)
    records = classify_all(ctx.config, log=ctx.log, cases=cases)
    if args.verbose:
        for rejection in ctx.log:
            print(f"  rejected {rejection}", file=sys.stderr)
    problems = [p for r in records for p in check_record(r)]
    if problems:
        for p in problems:
            print(fill(p), file=sys.stderr)
        return EXIT_MISMATCH
    print(format_records(records, args.format))
    return EXIT_OK


def cmd_verify(args, ctx):
    path = args.path or args.fixtures or fixtures_dir()
    if not os.path.exists(path):
        print(f"No such fixture: {path}", file=sys.stderr)
        return EXIT_USAGE
    paths = list_fixtures(path) if os.path.isdir(path) else [path]
    worst = EXIT_OK
    for p in paths:
        code, lines = _verify_file(p, ctx.records)
        print("\n".join(lines))
        worst = max(worst, code)
    return worst


def cmd_check(args, ctx):
    if args.suite == "all":
        names = list(SUITES)
    else:
        names = [args.suite]
    problems = []
    for name in names:
        if name == "toric":
            found = check_toric(ctx, args.fixtures)
        else:
            found = SUITES[name](ctx)
        problems += [f"{name}: {p}" for p in found]
    if args.suite == "all":
        problems += [f"classifier: {p}" for p in check_classification(ctx)]
    for p in problems:
        print(fill(p, subsequent_indent="  "))
    print("ok" if not problems else f"{len(problems)} failed invariants")
    return EXIT_OK if not problems else EXIT_MISMATCH


def cmd_list_exceptional(args, ctx):
    m = SurfaceModel(args.model, args.k)
    try:
        classes = exceptional_classes(
            m, ctx.config["exceptional_degree_bound"], ctx.config["exceptional_multiplicity_bound"]
        )
    except ValueError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    print(f"{m.label}: {len(classes)} exceptional classes")
    for E in classes:
        print(f"  {format_class(m, E)}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="semifree-tfd",
        description="Fixed point data of semifree Hamiltonian circle actions on monotone 6-manifolds.",
    )
    ap.add_argument("--config", default=None, help="Directory containing config.yml with search bounds.")
    ap.add_argument("--verbose", action="store_true", help="Print the provenance of rejected branches.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="Print the classification table.")
    p.add_argument("--format", choices=["json", "markdown", "tsv"], default="markdown")
    p.add_argument("--case", choices=list(PATTERNS) + ["all"], default="all")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify-example", help="Match a fixture (or a directory of fixtures).")
    p.add_argument("path", nargs="?", default=None)
    p.add_argument("--fixtures", default=None, help="Fixture directory (default: shipped fixtures).")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", help="Run invariant suites.")
    p.add_argument("suite", nargs="?", choices=["all"] + list(SUITES), default="all")
    p.add_argument("--fixtures", default=None, help="Fixture directory for the toric suite.")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("list-exceptional", help="List the exceptional classes of a model.")
    p.add_argument("--model", choices=["P2", "S2xS2", "Hirzebruch"], default="P2")
    p.add_argument("--k", type=int, default=1, help="Number of blow-ups.")
    p.set_defaults(func=cmd_list_exceptional)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, yaml.YAMLError, InvalidConfigError) as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    ctx = _Context(config, verbose=args.verbose)
    return args.func(args, ctx)


if __name__ == "__main__":
    sys.exit(main())
