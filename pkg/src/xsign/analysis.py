"""End-to-end corpus analysis: index, group, assess per view, run the
finding analyzers, and lint. One deterministic entry point shared by the
CLI, the scenario scripts, and the test suites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import findings as findings_mod
from . import xsext
from .certmodel import CertRecord
from .findings import AssessmentSet, Finding
from .pathengine import (DEFAULT_MAX_DEPTH, CertIndex, assess_trust,
                         build_index)
from .revocation import RevocationRecord, RevocationView
from .truststore import OperatorMap, RootStoreTimeline
from .xsdetect import DEFAULT_OVERLAP_MIN_DAYS, XSCertGroup, classify_groups, group_xs

# Synthetic revocation-free view backing coverage-style analyzers; named so
# its appearances in finding evidence are self-explanatory. It never shows
# up in assessment reports.
COVERAGE_VIEW_ID = "no-revocations"


@dataclass(frozen=True)
class AnalysisOptions:
    max_depth: int = DEFAULT_MAX_DEPTH
    overlap_min: int = DEFAULT_OVERLAP_MIN_DAYS
    mode: str = "structural"
    max_validity_days: int = xsext.DEFAULT_MAX_VALIDITY_DAYS
    backdating_slack_days: int = findings_mod.DEFAULT_BACKDATING_SLACK_DAYS


@dataclass
class AnalysisResult:
    index: CertIndex
    xs_groups: list[XSCertGroup]
    reissuance_groups: list[XSCertGroup]
    assessments: AssessmentSet
    findings: list[Finding]
    views: list[RevocationView]
    truncated_certs: list[str] = field(default_factory=list)


def analyze_corpus(records: Sequence[CertRecord],
                   stores: Sequence[RootStoreTimeline],
                   revocations: Sequence[RevocationRecord],
                   views: Sequence[RevocationView] = (),
                   operator_map: Optional[OperatorMap] = None,
                   options: AnalysisOptions = AnalysisOptions()) -> AnalysisResult:
    index = build_index(records)
    xs_groups, reissuance = group_xs(index, overlap_min=options.overlap_min,
                                     mode=options.mode)
    xs_groups = classify_groups(xs_groups, stores, operator_map, index)

    view_list = list(views)
    if not view_list:
        view_list = [RevocationView(
            "all", frozenset(r.source.name for r in revocations))]
    # Revocation-free view backs coverage-style analyzers (trust deltas,
    # barrier breaches): a cross-sign's intended reach, not its fate.
    coverage_view = RevocationView(COVERAGE_VIEW_ID, frozenset())

    assessments = AssessmentSet()
    truncated = []
    stores = sorted(stores, key=lambda s: s.store_id)
    for record in index.sorted_records():
        for view in [*view_list, coverage_view]:
            assessment = assess_trust(record, index, stores, revocations, view,
                                      max_depth=options.max_depth,
                                      mode=options.mode)
            assessments.add(assessment)
            if assessment.truncated and view is coverage_view:
                truncated.append(record.fingerprint)

    all_findings = findings_mod.run_all(
        xs_groups, index, stores, revocations, view_list, assessments,
        coverage_view_id=COVERAGE_VIEW_ID, operator_map=operator_map,
        slack_days=options.backdating_slack_days)
    return AnalysisResult(
        index=index, xs_groups=xs_groups, reissuance_groups=reissuance,
        assessments=assessments, findings=all_findings, views=view_list,
        truncated_certs=truncated)


def lint_corpus(result: AnalysisResult,
                stores: Sequence[RootStoreTimeline],
                extensions: dict[str, xsext.XsExtension],
                revocations: Sequence[RevocationRecord],
                max_validity_days: int = xsext.DEFAULT_MAX_VALIDITY_DAYS,
                explanations: Sequence[str] = (),
                operator_map: Optional[OperatorMap] = None) -> list[xsext.LintVerdict]:
    verdicts: list[xsext.LintVerdict] = []
    for group in result.xs_groups:
        coverage = {fp: result.assessments.covered_stores(fp, COVERAGE_VIEW_ID)
                    for fp in group.members}
        verdicts.extend(xsext.lint_cross_sign(
            group, stores, extensions, revocations,
            max_validity_days=max_validity_days,
            lookup=result.index.records,
            coverage=coverage,
            views=result.views,
            explanations=explanations,
            index=result.index,
            operator_map=operator_map,
        ))
    verdicts.sort(key=lambda v: (v.code, v.member, v.detail))
    return verdicts
