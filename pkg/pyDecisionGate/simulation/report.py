from pathlib import Path

from pyDecisionGate import utils
from pyDecisionGate.simulation.overlay import OverlayReport
from pyDecisionGate.simulation.harness import RejectionReport

REPORT_HEADER = [
    "scenario",
    "structure",
    "correction",
    "R_S",
    "R_G",
    "R_DSDG",
    "R_DQ",
    "decision_rate",
    "se_decision",
]

OVERLAY_HEADER = [
    "metric",
    "hypothesis",
    "looks",
    "sig_decision",
    "sig_deteriorating",
    "sig_final",
    "sig_both",
]


def report_table(reports: list[RejectionReport], separator: str = ",") -> str:
    rows = [
        [
            report.scenario,
            report.structure,
            report.correction,
            report.R_S,
            report.R_G,
            report.R_DSDG,
            report.R_DQ,
            report.decision_rate,
            report.se_decision,
        ]
        for report in reports
    ]
    return utils.as_table(REPORT_HEADER, rows, separator=separator)


def report_json(reports: list[RejectionReport]) -> str:
    return utils.as_json({"reports": [report.to_dict() for report in reports]})


def overlay_table(reports: list[OverlayReport], separator: str = ",") -> str:
    rows = [
        [
            report.metric_kind.value,
            report.hypothesis.value,
            report.k_looks,
            report.sig_decision,
            report.sig_deteriorating,
            report.sig_final,
            report.sig_both,
        ]
        for report in reports
    ]
    return utils.as_table(OVERLAY_HEADER, rows, separator=separator)


def overlay_json(reports: list[OverlayReport]) -> str:
    return utils.as_json({"reports": [report.to_dict() for report in reports]})


def write_report(text: str, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(utils.ensure_newline(text), encoding="utf-8")
    return path
