"""
Commands of soslab command line tool. Each command returns exit code.
"""

import argparse
import json
import logging
import math
import os
from dataclasses import dataclass
from typing import List, Optional
import numpy as np
from cli.config_data import DEFAULT_CONFIG_DATA, Defaults, save_config_file
from cli.utils import format_float, write_text_atomic
from stochsched import guarantees
from stochsched.assignment import greedy_assignment
from stochsched.bounds import build_lpr, export_mps, scale_instance, solve_lpr
from stochsched.certificate import build_dual_certificate, verify_dual_certificate
from stochsched.densities import Density, UniformDensity, density_f_delta, density_from_json, verify_density_conditions
from stochsched.instance import InstanceSpec, decode_text, generate_instance, instance_to_text, load_instance
from stochsched.policies import AlphaRule, FixedAlphaPolicy, RandomAlphaPolicy, alpha_star_delta, alpha_star_delta_nbue
from stochsched.simulation import Comparator, RatioReport, empirical_ratio_report, results_to_csv
from stochsched.variation import GOLDEN_ALPHA


CERTIFICATE_TOLERANCE: float = 1e-6
MAX_CURVE_DELTA: float = 10.0


@dataclass
class RunConfig:
    """
    Class keeps consistent parameters of policy run.
    """

    instances: List[str]
    policy: str
    alpha: Optional[float] = None
    delta: Optional[float] = None
    nbue_delta: Optional[float] = None
    density: Optional[str] = None
    reps: int = int(DEFAULT_CONFIG_DATA["reps"])
    seed: int = int(DEFAULT_CONFIG_DATA["seed"])
    comparator: str = DEFAULT_CONFIG_DATA["comparator"]
    busy_times: bool = False
    lp_cap: int = int(DEFAULT_CONFIG_DATA["lp_cap"])
    threads: int = 1
    out: Optional[str] = None
    trace: Optional[str] = None

    def __post_init__(self) -> None:
        base = self.base_policy
        if self.density is not None and base != "rsos":
            raise ValueError("Density is given only for rsos policies")
        if self.alpha is not None and base != "sos":
            raise ValueError("Alpha is given only for sos policies")
        if self.nbue_delta is not None and base != "sos":
            raise ValueError("NBUE parameter is given only for sos policies")
        if base == "dsos" and self.delta is not None:
            raise ValueError("dsos policy takes no parameters")
        if base == "sos" and sum(value is not None for value in (self.alpha, self.delta, self.nbue_delta)) != 1:
            raise ValueError("sos policy needs exactly one of --alpha, --delta and --nbue-delta")
        if base == "rsos" and self.density == "fdelta" and self.delta is None:
            raise ValueError("Density fdelta needs --delta")
        if base == "rsos" and self.delta is not None and self.density != "fdelta":
            raise ValueError("--delta for rsos is used only with --density fdelta")
        if self.alpha is not None and not 0 < self.alpha <= 1:
            raise ValueError(f"Alpha must be in (0, 1], got {self.alpha}")
        if self.nbue_delta is not None and self.nbue_delta < 1:
            raise ValueError(f"NBUE parameter must be at least 1, got {self.nbue_delta}")
        if self.comparator not in ("auto",) + tuple(item.value for item in Comparator):
            raise ValueError(f"Unknown comparator {self.comparator}")
        if self.busy_times and self.comparator not in ("auto", Comparator.SURROGATE.value):
            raise ValueError("Mean busy times are compared only with the surrogate")
        if self.busy_times and base == "rsos" and self.density not in (None, "uniform"):
            raise ValueError("Mean busy times of rsos are checked only with uniform density")

    @property
    def base_policy(self) -> str:
        return self.policy[3:] if self.is_greedy else self.policy

    @classmethod
    def from_args(cls, args: argparse.Namespace, defaults: Defaults) -> "RunConfig":
        return cls(args.instances, args.policy, args.alpha, args.delta, args.nbue_delta, args.density, args.reps,
                   args.seed, args.comparator, args.busy_times, args.lp_cap, defaults.threads, args.out, args.trace)

    @property
    def is_greedy(self) -> bool:
        return self.policy.startswith("ga-")

    def resolve_comparator(self) -> Comparator:
        if self.comparator != "auto":
            return Comparator(self.comparator)
        return Comparator.SURROGATE if self.is_greedy or self.busy_times else Comparator.MEAN_BUSY


def _load_density(path: str) -> Density:
    with open(path, "rb") as file:
        text = decode_text(file.read())
    return density_from_json(json.loads(text))


def _trace_path(path: str, instance_id: str, several: bool) -> str:
    if not several:
        return path
    root, extension = os.path.splitext(path)
    return f"{root}_{instance_id}{extension}"


def _write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        print(text, end="")
    else:
        write_text_atomic(path, text)
        logging.info("Written %s", path)


def build_rule(config: RunConfig) -> AlphaRule:
    """
    Function creates alpha rule from run parameters.
    :param config: run parameters.
    :return: alpha rule.
    """

    prefix = "ga-" if config.is_greedy else ""
    base = config.base_policy
    if base == "dsos":
        return FixedAlphaPolicy(GOLDEN_ALPHA, f"{prefix}dsos")
    if base == "sos":
        if config.alpha is not None:
            return FixedAlphaPolicy(config.alpha, f"{prefix}sos({config.alpha:.12g})")
        if config.delta is not None:
            alpha, c = alpha_star_delta(config.delta)
            logging.info("SOS tuned for Delta=%s: alpha=%s, c=%s", config.delta, alpha, c)
            return FixedAlphaPolicy(alpha, f"{prefix}sos-alpha-delta")
        alpha, c = alpha_star_delta_nbue(config.nbue_delta)
        logging.info("SOS tuned for %s-NBUE: alpha=%s, c=%s", config.nbue_delta, alpha, c)
        return FixedAlphaPolicy(alpha, f"{prefix}sos-nbue")
    if config.density in (None, "uniform"):
        return RandomAlphaPolicy(UniformDensity(), f"{prefix}rsos")
    if config.density == "fdelta":
        density = density_f_delta(config.delta)
        logging.info("Density f_Delta for Delta=%s: c=%s", config.delta, density.c)
        return RandomAlphaPolicy(density, f"{prefix}rsos-fdelta")
    return RandomAlphaPolicy(_load_density(config.density), f"{prefix}rsos-step")


def cmd_certify(args: argparse.Namespace, defaults: Defaults) -> int:
    """
    Function runs greedy assignment on scaled instance, solves time-indexed relaxation and checks dual certificate.
    :param args: command line arguments;
    :param defaults: defaults from config file.
    :return: exit code.
    """

    instance = load_instance(args.instance)
    model = build_lpr(instance, args.lp_cap)
    if args.export_lp:
        write_text_atomic(args.export_lp, export_mps(model))
        logging.info("LP written to %s", args.export_lp)
    solution = solve_lpr(model)
    sigma, scaled = scale_instance(instance)
    states, trace = greedy_assignment(scaled)
    certificate = build_dual_certificate(model, states, trace)
    report = verify_dual_certificate(certificate, model, solution.value)
    surrogate = trace.total_cost() / float(sigma)
    dual_bound = report.dual_value >= surrogate / 4 - CERTIFICATE_TOLERANCE * max(1.0, surrogate)
    lp_bound = surrogate <= 4 * solution.value * (1 + CERTIFICATE_TOLERANCE) + CERTIFICATE_TOLERANCE
    lines = [f"sigma={sigma}",
             f"horizon={model.horizon}",
             f"lp_value={format_float(solution.value)}",
             f"surrogate_total={format_float(surrogate)}",
             f"dual_value={format_float(report.dual_value)}",
             f"weak_duality_gap={format_float(report.weak_duality_gap)}",
             f"worst_slack={format_float(report.worst_slack)}",
             f"dual_feasible={str(report.feasible).lower()}",
             f"dual_at_least_quarter_surrogate={str(dual_bound).lower()}",
             f"surrogate_at_most_4_lp={str(lp_bound).lower()}"]
    _write_output("\n".join(lines) + "\n", args.out)
    certified = report.feasible and dual_bound and lp_bound
    if certified:
        logging.info("Instance %s certified", args.instance)
    else:
        logging.error("Instance %s is not certified", args.instance)
    return 0 if certified else 2


def cmd_check_density(args: argparse.Namespace, defaults: Defaults) -> int:
    """
    Function checks conditions of guarantee for step density given by user.
    :param args: command line arguments;
    :param defaults: defaults from config file.
    :return: 0 if both conditions hold.
    """

    if args.delta is not None and args.nbue_delta is not None:
        raise ValueError("Give either --delta or --nbue-delta")
    density = _load_density(args.density)
    c = args.c if args.c is not None else density.c
    if c is None:
        raise ValueError("Guarantee c is given neither in density file nor by --c")
    report = verify_density_conditions(density, c, delta=args.delta, nbue_delta=args.nbue_delta,
                                       grid_size=args.grid)
    lines = [f"c={format_float(c)}",
             f"max_violation_i={format_float(report.max_violation_i)}",
             f"max_violation_ii={format_float(report.max_violation_ii)}",
             f"normalization_error={format_float(report.normalization_error)}",
             f"holds={str(report.holds).lower()}"]
    _write_output("\n".join(lines) + "\n", None)
    return 0 if report.holds else 2


def cmd_config(args: argparse.Namespace, defaults: Defaults) -> int:
    if args.write_defaults:
        path = save_config_file()
        print(f"Значения по умолчанию записаны в {path}")
        return 0
    for key, value in vars(defaults).items():
        print(f"{key} = {value}")
    return 0


def cmd_curves(args: argparse.Namespace, defaults: Defaults) -> int:
    """
    Function writes guarantee tables: unrelated machines, single machine, misspecified Delta and NBUE.
    :param args: command line arguments;
    :param defaults: defaults from config file.
    :return: exit code.
    """

    if not 0 <= args.start <= args.stop <= MAX_CURVE_DELTA:
        raise ValueError(f"Range of Delta must lie in [0, {MAX_CURVE_DELTA:g}], got [{args.start}, {args.stop}]")
    if args.step <= 0 or args.misspec_step <= 0:
        raise ValueError("Steps must be positive")
    deltas = np.linspace(args.start, args.stop, int(round((args.stop - args.start) / args.step)) + 1)
    coarse = np.linspace(args.start, args.stop, int(round((args.stop - args.start) / args.misspec_step)) + 1)
    tables = {"unrelated.csv": guarantees.unrelated_table(deltas),
              "single_machine.csv": guarantees.single_machine_table(deltas),
              "misspecified.csv": guarantees.misspecified_table(coarse, list(coarse) + [math.inf]),
              "nbue.csv": guarantees.nbue_table(1 + deltas)}
    os.makedirs(args.out, exist_ok=True)
    for file_name, table in tables.items():
        write_text_atomic(os.path.join(args.out, file_name), table.to_csv())
        logging.info("Curve table %s: %d rows", file_name, len(table.rows))
    print(f"gmux_crossing={format_float(guarantees.gmux_crossing())}")
    return 0


def cmd_generate(args: argparse.Namespace, defaults: Defaults) -> int:
    """
    Function generates random instance and writes it in JSON format.
    :param args: command line arguments;
    :param defaults: defaults from config file.
    :return: exit code.
    """

    seed = defaults.seed if args.seed is None else args.seed
    spec = InstanceSpec(args.n, args.m, args.family, delta_target=args.delta, even_integer=args.even_integer)
    instance = generate_instance(spec, seed)
    _write_output(instance_to_text(instance), args.out)
    return 0


def cmd_run(args: argparse.Namespace, defaults: Defaults) -> int:
    """
    Function evaluates policy on instances by Monte Carlo and writes results CSV.
    :param args: command line arguments;
    :param defaults: defaults from config file.
    :return: 0 if every check passed, 2 otherwise.
    """

    config = RunConfig.from_args(args, defaults)
    return run(config)


def run(config: RunConfig) -> int:
    """
    Function runs configured policy on every instance.
    :param config: run parameters.
    :return: 0 if every check passed, 2 otherwise.
    """

    rule = build_rule(config)
    comparator = config.resolve_comparator()
    reports: List[RatioReport] = []
    several = len(config.instances) > 1
    for path in config.instances:
        instance = load_instance(path)
        if not config.is_greedy and instance.machines != 1:
            raise ValueError(f"Policy {config.policy} is a single machine policy, instance {path} has "
                             f"{instance.machines} machines")
        instance_id = os.path.splitext(os.path.basename(path))[0]
        report = empirical_ratio_report(instance, rule, comparator, config.reps, config.seed, instance_id,
                                        config.busy_times, config.threads, config.lp_cap)
        logging.info("Instance %s, policy %s: c = %s", instance_id, rule.name, report.guarantee)
        reports.append(report)
        if config.trace:
            _, trace = greedy_assignment(instance)
            write_text_atomic(_trace_path(config.trace, instance_id, several), trace.to_csv())
    _write_output(results_to_csv(reports), config.out)
    return 0 if all(report.passed for report in reports) else 2
