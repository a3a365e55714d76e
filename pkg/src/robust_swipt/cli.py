"""Command-line interface: ``robust-swipt <command> ...``.

Exit codes: 0 on success (optimal design), 2 when the design problem is
infeasible, 1 on any other error. Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .complexity import estimate
from .conic.sdpa import export_sdpa
from .conic.solver import Status
from .errors import RobustSwiptError
from .experiments import HISTOGRAM_HEADER, histogram_rows, parse_sweep, run_sweep, write_rows
from .io import dumps, load_config, solution_from_dict, solution_to_dict, write_json
from .solution import Method, design, validate_outage

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_changes(seed=args.seed)
    return cfg


def cmd_design(args) -> int:
    cfg = _config(args)
    sol = design(cfg.scenario(), args.method)
    if sol.status is Status.INFEASIBLE:
        print(f"design infeasible ({sol.method.value})", file=sys.stderr)
        return EXIT_INFEASIBLE
    if not sol.ok:
        print(f"solver did not reach an optimum: {sol.status.value}", file=sys.stderr)
        return EXIT_ERROR
    out = solution_to_dict(sol)
    out["config"] = cfg.to_dict()
    if args.out:
        write_json(args.out, out)
    else:
        sys.stdout.write(dumps(out))
    if not sol.rank_one:
        print(f"warning: solution is not rank-one (max ratio {sol.max_rank_ratio:.3e})", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    path = Path(args.spec)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read sweep spec: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.seed is not None:
        data["seed"] = args.seed
    spec = parse_sweep(data, base_dir=path.parent)
    return EXIT_OK if run_sweep(spec, args.out) else EXIT_ERROR


def cmd_histogram(args) -> int:
    cfg = _config(args)
    rows = histogram_rows(cfg, args.realizations, args.draws, cfg.seed)
    write_rows(rows, HISTOGRAM_HEADER, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config(args)
    try:
        data = json.loads(Path(args.solution).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read solution: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sol = solution_from_dict(data)
    if sol.W is None:
        print("solution file holds no beamformers", file=sys.stderr)
        return EXIT_ERROR
    scenario_seed = data.get("meta", {}).get("scenario_seed", cfg.seed)
    scenario = cfg.scenario(scenario_seed)
    rep = validate_outage(sol, scenario, args.draws, args.draw_seed)
    out = rep.to_dict()
    out["within_tolerance_3se"] = rep.within(scenario.config)
    out["scenario_seed"] = scenario_seed
    if args.out:
        write_json(args.out, out)
    else:
        sys.stdout.write(dumps(out))
    return EXIT_OK


def cmd_export_sdpa(args) -> int:
    from .benchmark import assemble_perfect_csi
    from .bernstein import LMI, assemble_method2
    from .sprocedure import assemble_method1

    cfg = _config(args)
    scenario = cfg.scenario()
    m = Method.parse(args.method)
    if m is Method.METHOD1:
        problem = assemble_method1(scenario)
    elif m is Method.METHOD2_LMI:
        problem = assemble_method2(scenario, encoding=LMI)
    elif m is Method.METHOD2_SOC:
        problem = assemble_method2(scenario)
    elif m is Method.BENCHMARK:
        problem = assemble_perfect_csi(scenario)
    else:
        problem = assemble_method1(scenario, include_leakage=False)
    Path(args.out).write_text(export_sdpa(problem))
    return EXIT_OK


def cmd_complexity(args) -> int:
    rows = []
    for M in args.M:
        for method in (1, 2):
            rows.append(estimate(method, args.U, args.N, M, args.epsilon).to_dict())
    sys.stdout.write(dumps(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="robust-swipt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("config", help="JSON configuration file")
        sp.add_argument("--seed", type=int, help="override the configuration seed")

    sp = sub.add_parser("design", help="solve one design and write the solution JSON")
    with_config(sp)
    sp.add_argument("--method", default="Method2-soc", help=f"one of {[m.value for m in Method]}")
    sp.add_argument("--out", help="output JSON (default: stdout)")
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("sweep", help="run a parameter sweep and write a CSV")
    sp.add_argument("spec", help="JSON sweep specification")
    sp.add_argument("--out", required=True, help="output CSV")
    sp.add_argument("--seed", type=int, help="override the master seed")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("histogram", help="per-realization average leakage SINR per method")
    with_config(sp)
    sp.add_argument("--realizations", type=int, default=100)
    sp.add_argument("--draws", type=int, default=1000)
    sp.add_argument("--out", required=True, help="output CSV")
    sp.set_defaults(func=cmd_histogram)

    sp = sub.add_parser("validate", help="Monte-Carlo outage check of a saved solution")
    with_config(sp)
    sp.add_argument("solution", help="solution JSON written by 'design'")
    sp.add_argument("--draws", type=int, default=1000)
    sp.add_argument("--draw-seed", type=int, default=1)
    sp.add_argument("--out", help="output JSON (default: stdout)")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("export-sdpa", help="write the design problem in SDPA sparse format")
    with_config(sp)
    sp.add_argument("--method", default="Method2-lmi")
    sp.add_argument("--out", required=True, help="output .dat-s file")
    sp.set_defaults(func=cmd_export_sdpa)

    sp = sub.add_parser("complexity", help="worst-case complexity estimates as JSON")
    sp.add_argument("--U", type=int, default=2)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--M", type=int, nargs="+", default=[6])
    sp.add_argument("--epsilon", type=float, default=1e-7)
    sp.set_defaults(func=cmd_complexity)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RobustSwiptError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
