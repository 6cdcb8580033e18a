"""Factory module for selecting the correction function of a policy."""

from functools import partial

from pyDecisionGate.design.model import CorrectionKind


def get(kind: CorrectionKind | str):
    kind = CorrectionKind(kind)
    from pyDecisionGate.design import corrections

    if kind == CorrectionKind.NONE:
        return corrections.correct_none
    if kind == CorrectionKind.ONLY_ALPHA:
        return corrections.correct_only_alpha
    if kind == CorrectionKind.PROP33:
        return corrections.correct_prop33
    if kind == CorrectionKind.PROP41:
        return corrections.correct_prop41
    if kind == CorrectionKind.PROP41_IMPROVED:
        return partial(corrections.correct_prop41_improved, use_remark=False)
    if kind == CorrectionKind.PROP41_IMPROVED_REMARK:
        return partial(corrections.correct_prop41_improved, use_remark=True)
    if kind == CorrectionKind.PROP41_GUARDRAIL:
        return corrections.correct_prop41_guardrail
    raise ValueError(f"Unsupported correction '{kind}'")
