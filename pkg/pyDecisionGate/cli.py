import argparse
import logging
import sys
from pathlib import Path

from pyDecisionGate import utils
from pyDecisionGate.decision import evaluate_experiment, explain
from pyDecisionGate.design.analytic import deterioration_probability_table, figure_power_curve
from pyDecisionGate.design.model import CorrectionKind, CorrectionPolicy, DesignPlan, MetricCounts, RiskBudget
from pyDecisionGate.design.plan import achieved_power_by_metric
from pyDecisionGate.errors import DomainError, PlanningError
from pyDecisionGate.factory.config import read_config
from pyDecisionGate.factory.results import read_results
from pyDecisionGate.model import Decision, ExperimentOutcome
from pyDecisionGate.sequential import DEFAULT_RHO, BoundarySchedule, SpendingKind
from pyDecisionGate.simulation import report
from pyDecisionGate.simulation.overlay import run_overlay_table
from pyDecisionGate.simulation.harness import run_simulation, run_table
from pyDecisionGate.simulation.scenario import (
    DEFAULT_REPLICATIONS,
    FULL_REPLICATIONS,
    CovarianceStructure,
    Scenario,
    SimulationConfig,
    default_seed,
    study_grid,
)

EXIT_SHIP = 0
EXIT_NO_SHIP = 1
EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3

logger = logging.getLogger(__name__)


def configure_logger(level: int = logging.INFO):
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger().setLevel(level)
    logger.debug("Logger configured")


def _add_format(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--format",
        help="Output format.",
        choices=["table", "json"],
        default="table",
    )


def _add_design_parser(commands):
    parser = commands.add_parser("design", help="Per-test levels, power targets and sample size.")
    parser.add_argument("config", help="Experiment configuration (.toml or .json).", type=Path)
    _add_format(parser)
    parser.set_defaults(handler=cmd_design)


def _add_evaluate_parser(commands):
    parser = commands.add_parser("evaluate", help="Ship decision for observed results.")
    parser.add_argument("config", help="Experiment configuration (.toml or .json).", type=Path)
    parser.add_argument("results", help="Experiment results (.toml or .json).", type=Path)
    _add_format(parser)
    parser.set_defaults(handler=cmd_evaluate)


def _add_simulate_parser(commands):
    parser = commands.add_parser("simulate", help="Monte Carlo error rates of the decision rules.")
    parser.add_argument("--scenario", choices=[value.value for value in Scenario], default=Scenario.STATUS_QUO.value)
    parser.add_argument(
        "--structure",
        choices=[value.value for value in CovarianceStructure if value != CovarianceStructure.EXPLICIT],
        default=CovarianceStructure.INDEPENDENT.value,
    )
    parser.add_argument(
        "--correction",
        choices=[value.value for value in CorrectionKind],
        default=CorrectionKind.PROP41.value,
    )
    parser.add_argument("--nyholt", help="Use effective test counts of the correlated blocks.", action="store_true")
    parser.add_argument("--reps", help="Replications per cell.", type=int, default=None)
    parser.add_argument("--full", help=f"Use {FULL_REPLICATIONS} replications.", action="store_true")
    parser.add_argument("--seed", help="Seed, defaults to $DECISION_GATE_SEED.", type=int, default=None)
    parser.add_argument("--looks", help="Interim analyses of deterioration tests.", type=int, default=10)
    parser.add_argument("--threads", help="Simulation worker threads.", type=int, default=1)
    parser.add_argument("--rule", help="Decision rule, defaults to the correction's rule.", type=int, choices=[1, 2])
    parser.add_argument("--success", help="Number of success metrics.", type=int, default=5)
    parser.add_argument("--guardrails", help="Number of guardrail metrics.", type=int, default=5)
    parser.add_argument("--deterioration", help="Number of extra deterioration metrics.", type=int, default=2)
    parser.add_argument("--quality", help="Number of quality tests.", type=int, default=2)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--alpha-minus", type=float, default=None)
    parser.add_argument("--beta", type=float, default=0.2)
    parser.add_argument("--paper-tables", help="Run all scenarios, structures and corrections.", action="store_true")
    parser.add_argument("--appendix-c", help="Run the sequential deterioration overlay table.", action="store_true")
    parser.add_argument(
        "--spending",
        help="Alpha spending of the overlay deterioration test.",
        choices=[value.value for value in SpendingKind],
        default=SpendingKind.OBRIEN_FLEMING.value,
    )
    parser.add_argument("--rho", help="Exponent of the power spending family.", type=float, default=DEFAULT_RHO)
    parser.add_argument("-o", "--out", help="Write the report to this file.", type=Path, default=None)
    _add_format(parser)
    parser.set_defaults(handler=cmd_simulate)


def _add_figure_parser(commands):
    parser = commands.add_parser("figure", help="Analytic power curve and deterioration risk table.")
    parser.add_argument("--max-guardrails", type=int, default=25)
    parser.add_argument("--beta", type=float, default=0.2)
    parser.add_argument(
        "--deterioration-table",
        help="Print the deterioration probability of success metrics instead.",
        action="store_true",
    )
    _add_format(parser)
    parser.set_defaults(handler=cmd_figure)


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decision-gate",
        description="Plans, evaluates and simulates ship decisions of A/B tests.",
        epilog="Ship responsibly!",
    )
    parser.add_argument("-v", "--verbose", help="Log debug messages.", action="store_true")
    parser.add_argument("-q", "--quiet", help="Only log warnings and errors.", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)
    _add_design_parser(commands)
    _add_evaluate_parser(commands)
    _add_simulate_parser(commands)
    _add_figure_parser(commands)
    return parser


def _write(text: str, out: Path | None = None):
    if out is None:
        sys.stdout.write(utils.ensure_newline(text))
        return
    report.write_report(text, out)
    logger.info("Report written to %s", out)


def _plan_table(plan: DesignPlan, powers: dict[str, float], schedule: BoundarySchedule | None) -> str:
    correction = plan.correction
    lines = [
        f"policy: {plan.policy.label} (Decision Rule {plan.rule})",
        f"counts: S={plan.counts.S} G={plan.counts.G} D={plan.counts.D} Q={plan.counts.Q}",
        f"alpha_success: {utils.format_number(correction.alpha_success)}",
        f"alpha_guardrail: {utils.format_number(correction.alpha_guardrail)}",
        f"alpha_minus_star: {utils.format_number(correction.alpha_minus_star)}",
        f"beta_star: {utils.format_number(correction.beta_star)}",
        f"required_n_per_group: {plan.required_n_per_group}",
    ]
    for block, value in plan.effective_tests.items():
        lines.append(f"effective_tests.{block}: {utils.format_number(value)}")
    lines.append("")
    rows = [[test.test_id, test.kind.value, test.level, powers.get(test.test_id)] for test in plan.tests]
    lines.append(utils.as_table(["test", "kind", "level", "achieved_power"], rows).rstrip("\n"))
    lines.append("")
    targets = [[metric, target] for metric, target in plan.power_targets.items()]
    lines.append(utils.as_table(["metric", "power_target"], targets).rstrip("\n"))
    if schedule is not None:
        lines.append("")
        looks = zip(schedule.information_fractions, schedule.critical_z, schedule.incremental_alpha)
        rows = [[index + 1, fraction, bound, spent] for index, (fraction, bound, spent) in enumerate(looks)]
        header = ["look", "information_fraction", "critical_z", "spent_alpha"]
        lines.append(utils.as_table(header, rows).rstrip("\n"))
    return "\n".join(lines)


def cmd_design(args: argparse.Namespace) -> int:
    config = read_config(args.config)
    plan = config.design_plan()
    schedule = config.boundary_schedule(plan)
    powers = achieved_power_by_metric(plan, config.metrics)
    if args.format == "json":
        values = plan.to_dict()
        values["achieved_power"] = powers
        values["boundaries"] = None if schedule is None else schedule.to_dict()
        _write(utils.as_json(values))
    else:
        _write(_plan_table(plan, powers, schedule))
    return EXIT_SHIP


def _outcome_rows(outcomes: ExperimentOutcome) -> list[list]:
    return [
        [
            entry.test_id,
            entry.outcome.z_statistic,
            entry.outcome.p_value,
            entry.outcome.significance_level,
            entry.rejected,
            entry.outcome.ci_lower,
            entry.outcome.ci_upper,
        ]
        for entry in outcomes.entries
    ]


def _decision_table(decision: Decision, outcomes: ExperimentOutcome) -> str:
    explained = explain(decision)
    lines = [f"verdict: {decision.verdict.value} (Decision Rule {decision.rule})", ""]
    clauses = [[item.clause.value, item.passed, " ".join(item.blocking)] for item in explained.clauses]
    lines.append(utils.as_table(["clause", "passed", "blocking"], clauses).rstrip("\n"))
    lines.append("")
    header = ["test", "z", "p_value", "level", "rejected", "ci_lower", "ci_upper"]
    lines.append(utils.as_table(header, _outcome_rows(outcomes)).rstrip("\n"))
    return "\n".join(lines)


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = read_config(args.config)
    results = read_results(args.results, config.srm_metric_id())
    plan = config.design_plan()
    decision, outcomes = evaluate_experiment(plan, config.metrics, results, config.boundary_schedule(plan))
    if args.format == "json":
        header = ["test", "z", "p_value", "level", "rejected", "ci_lower", "ci_upper"]
        values = {
            "decision": decision.to_dict(),
            "report": explain(decision).to_dict(),
            "tests": [dict(zip(header, row)) for row in _outcome_rows(outcomes)],
        }
        _write(utils.as_json(values))
    else:
        _write(_decision_table(decision, outcomes))
    return EXIT_SHIP if decision.is_ship() else EXIT_NO_SHIP


def _replications(args: argparse.Namespace) -> int:
    if args.reps is not None:
        return args.reps
    return FULL_REPLICATIONS if args.full else DEFAULT_REPLICATIONS


def _simulation_settings(args: argparse.Namespace) -> dict:
    alpha_minus = args.alpha if args.alpha_minus is None else args.alpha_minus
    return {
        "counts": MetricCounts(S=args.success, G=args.guardrails, D=args.deterioration, Q=args.quality),
        "budget": RiskBudget(alpha=args.alpha, alpha_minus=alpha_minus, beta=args.beta),
        "replications": _replications(args),
        "k_looks": args.looks,
        "seed": default_seed() if args.seed is None else args.seed,
        "rule": args.rule,
    }


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.threads < 1:
        raise DomainError(f"--threads must be at least 1, got {args.threads}")
    if args.appendix_c:
        seed = default_seed() if args.seed is None else args.seed
        overlays = run_overlay_table(
            args.looks,
            args.alpha,
            args.beta,
            _replications(args),
            seed,
            args.threads,
            spending_kind=SpendingKind(args.spending),
            rho=args.rho,
        )
        text = report.overlay_json(overlays) if args.format == "json" else report.overlay_table(overlays)
        _write(text, args.out)
        return EXIT_SHIP
    settings = _simulation_settings(args)
    if args.paper_tables:
        reports = run_table(study_grid(nyholt=args.nyholt, **settings), threads=args.threads)
    else:
        policy = CorrectionPolicy(
            kind=CorrectionKind(args.correction),
            nyholt=args.nyholt,
            nyholt_deterioration=args.nyholt,
        )
        config = SimulationConfig(
            policy=policy,
            scenario=Scenario(args.scenario),
            structure=CovarianceStructure(args.structure),
            **settings,
        )
        reports = [run_simulation(config, threads=args.threads)]
    text = report.report_json(reports) if args.format == "json" else report.report_table(reports)
    _write(text, args.out)
    return EXIT_SHIP


def cmd_figure(args: argparse.Namespace) -> int:
    if args.deterioration_table:
        table = deterioration_probability_table()
        sizes = sorted(next(iter(table.values())))
        if args.format == "json":
            values = {str(level): {str(size): value for size, value in row.items()} for level, row in table.items()}
            _write(utils.as_json(values))
        else:
            rows = [[level] + [row[size] for size in sizes] for level, row in table.items()]
            _write(utils.as_table(["beta"] + [f"S={size}" for size in sizes], rows))
        return EXIT_SHIP
    uncorrected = figure_power_curve(args.max_guardrails, args.beta, corrected=False)
    corrected = figure_power_curve(args.max_guardrails, args.beta, corrected=True)
    if args.format == "json":
        values = [
            {"guardrails": count, "uncorrected": uncorrected[count], "corrected": corrected[count]}
            for count in uncorrected
        ]
        _write(utils.as_json({"power_curve": values}))
    else:
        rows = [[count, uncorrected[count], corrected[count]] for count in uncorrected]
        _write(utils.as_table(["guardrails", "uncorrected", "corrected"], rows))
    return EXIT_SHIP


def _log_level(args: argparse.Namespace) -> int:
    if args.verbose:
        return logging.DEBUG
    if args.quiet:
        return logging.WARNING
    return logging.INFO


def main(argv: list[str] | None = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    configure_logger(_log_level(args))
    try:
        return args.handler(args)
    except PlanningError as exc:
        logger.error("Infeasible design: %s", exc)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        logger.error("Invalid input: %s", exc)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
