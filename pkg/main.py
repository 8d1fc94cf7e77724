import argparse
import datetime
import sys
import time

import colorama
import humanize

import utils.profiles
import utils.sc_logging
import utils.settings

import simplicial.experiments
from simplicial.errors import SimplicialError

EXIT_OK = 0
EXIT_ACCURACY = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplicial-sampling",
        description="Aggregation sampling and recovery of multi-order simplicial signals")
    subparsers = parser.add_subparsers(dest="command", required=True)

    commands = {
        "recover": "single noiseless recovery run",
        "sweep": "MSE grid over noise variance and sampling-set size",
        "gen": "generate and export the experiment complex",
        "check": "feasibility report only",
    }
    for name, help_text in commands.items():
        sub = subparsers.add_parser(name, help=help_text)
        _add_config_flags(sub)

    subparsers.add_parser("profiles", help="list the experiment profiles")
    return parser


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--profile", help="profile name under the profile directory (full, ci, small, ...)")
    parser.add_argument("--config", help="JSON file with ExperimentConfig fields")
    parser.add_argument("--complex", dest="complex_source", help="'small', 'two-hole' or a complex JSON path")
    parser.add_argument("--num-points", type=int, help="two-hole point count")
    parser.add_argument("--dataset-seed", type=int, help="two-hole dataset seed")
    parser.add_argument("--w0", type=int)
    parser.add_argument("--w2", type=int)
    parser.add_argument("--r1", type=int)
    parser.add_argument("-P", "--shifts", dest="p_shifts", type=int, help="number of aggregation shifts")
    parser.add_argument("-S", "--sample-sizes", type=int, nargs="+", help="sampling-set sizes |S|")
    parser.add_argument("--variances", type=float, nargs="+", help="noise variances")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", dest="master_seed", type=int, help="master seed")
    parser.add_argument("--output-dir")
    parser.add_argument("--spectral-scaling", dest="spectral_scaling", action="store_true", default=None)
    parser.add_argument("--no-spectral-scaling", dest="spectral_scaling", action="store_false")
    parser.add_argument("--resample-each-trial", action="store_true", default=None)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--tolerance", type=float)


def config_from_args(args) -> "simplicial.experiments.ExperimentConfig":
    profile = None
    if args.profile:
        profile = utils.profiles.get_profile(args.profile)
        if profile is None:
            raise SimplicialError(f"Unknown profile '{args.profile}', have {utils.profiles.list_profiles()}")

    overrides = {
        key: getattr(args, key)
        for key in ("complex_source", "w0", "w2", "r1", "p_shifts", "sample_sizes", "variances", "trials",
                    "master_seed", "output_dir", "spectral_scaling", "resample_each_trial", "workers", "tolerance")
    }
    two_hole = {"num_points": args.num_points, "seed": args.dataset_seed}
    overrides["two_hole"] = {k: v for k, v in two_hole.items() if v is not None} or None

    return simplicial.experiments.build_config(profile, args.config, overrides)


def _status(ok: bool) -> str:
    if ok:
        return colorama.Fore.GREEN + "yes" + colorama.Fore.RESET
    return colorama.Fore.RED + "no" + colorama.Fore.RESET


def _print_complex(report: dict):
    info = report["complex"]
    print(f"Complex: {humanize.intcomma(info['num_nodes'])} nodes, {humanize.intcomma(info['num_edges'])} edges, "
          f"{humanize.intcomma(info['num_triangles'])} triangles, betti {tuple(info['betti'])}")


def cmd_recover(cfg) -> int:
    report = simplicial.experiments.run_noiseless(cfg)
    _print_complex(report)

    feasibility = report["feasibility"]
    print(f"Feasible: {_status(feasibility['overall'])}   identifiable: {_status(report['identifiable'])}")
    for reason in feasibility["reasons"]:
        print(colorama.Fore.YELLOW + f"  - {reason}" + colorama.Fore.RESET)

    rank = report["recovery"]["rank_report"]
    print(f"rank(A) = {rank['rank']} / {rank['columns']}, condition {rank['condition']:.3e}")
    for name, error in report["recovery"]["relative_errors"].items():
        colour = colorama.Fore.GREEN if error <= cfg.tolerance else colorama.Fore.RED
        print(f"  {name}: relative error {colour}{error:.3e}{colorama.Fore.RESET}")

    if not report["identifiable"]:
        return EXIT_CONFIG
    return EXIT_OK if report["passed"] else EXIT_ACCURACY


def cmd_sweep(cfg) -> int:
    report = simplicial.experiments.run_mse_sweep(cfg)
    _print_complex(report)

    for skipped in report["skipped"]:
        print(colorama.Fore.YELLOW + f"Skipped |S| = {skipped['sample_size']}: {skipped['reason']}" + colorama.Fore.RESET)
    for row in report["rows"]:
        print(f"  variance {row['variance']:.0e}  |S| {row['sample_size']:>4}  MSE {row['mse']:.4e}")
    print(f"Wrote {report['csv']}")

    if not report["rows"]:
        return EXIT_CONFIG
    return EXIT_OK if report["passed"] else EXIT_ACCURACY


def cmd_gen(cfg) -> int:
    report = simplicial.experiments.run_generate(cfg)
    _print_complex(report)
    for path in report["files"]:
        print(f"Wrote {path}")
    return EXIT_OK


def cmd_check(cfg) -> int:
    report = simplicial.experiments.run_check(cfg)
    _print_complex(report)
    for check in report["checks"]:
        print(f"|S| = {check['sample_size']}: feasible {_status(check['feasible'])}, "
              f"identifiable {_status(check['identifiable'])}")
        for reason in check.get("feasibility", {}).get("reasons", []):
            print(colorama.Fore.YELLOW + f"  - {reason}" + colorama.Fore.RESET)
        if "error" in check:
            print(colorama.Fore.YELLOW + f"  - {check['error']}" + colorama.Fore.RESET)
    return EXIT_OK if report["feasible"] else EXIT_CONFIG


def cmd_profiles() -> int:
    for name in utils.profiles.list_profiles():
        profile = utils.profiles.get_profile(name)
        print(f"{colorama.Fore.CYAN}{name}{colorama.Fore.RESET}: {profile.get('description', '')}")
    return EXIT_OK


COMMANDS = {
    "recover": cmd_recover,
    "sweep": cmd_sweep,
    "gen": cmd_gen,
    "check": cmd_check,
}


def main(argv=None) -> int:
    utils.sc_logging.initialize()
    args = build_parser().parse_args(argv)

    if args.command == "profiles":
        return cmd_profiles()

    start = time.perf_counter()
    try:
        cfg = config_from_args(args)
        print(f"{colorama.Fore.CYAN}Running '{args.command}' ({cfg.name}, {cfg.complex_source}, "
              f"{humanize.intcomma(cfg.trials)} trials){colorama.Fore.RESET}")
        status = COMMANDS[args.command](cfg)
    except SimplicialError as e:
        print(colorama.Fore.RED + f"Error: {e}" + colorama.Fore.RESET)
        utils.sc_logging.log_error(str(e), type(e).__name__)
        return EXIT_CONFIG

    elapsed = datetime.timedelta(seconds=time.perf_counter() - start)
    print(f"Finished in {humanize.precisedelta(elapsed, minimum_unit='milliseconds')}")
    utils.sc_logging.update_debug_log(f"Command {args.command} exited with status {status}")
    return status


if __name__ == "__main__":
    colorama.init()
    sys.exit(main())
