"""Report bundles: CSV tables, plot-ready series, and a digest manifest.

A run writes into a fresh directory (timestamped under the output root, or
a caller-chosen id) and never mutates existing outputs. The manifest echoes
the full configuration, records a digest for every input and output file,
and is written last; identical inputs and seed reproduce byte-identical
tables.

Plot series are numeric JSON documents with axis metadata, one per figure
family: effort-versus-employment scatter, skill distribution bars, and the
autonomy heatmap. Rendering is left to the consumer.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .coverage import (
    BreadthStats,
    CoverageReport,
    EffortDistribution,
    GroupLevel,
    breadth,
    coverage,
    effort_by_node,
)
from .economics import (
    AlignmentReport,
    DigitalShareTable,
    FamilyEconTable,
    SkillEconTable,
    alignment_report,
)
from .io import render_table
from .mapping import MappingResult, OutcomeStats
from .sampling import SensitivitySummary
from .taxonomy import Taxonomy, TaxonomyKind


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def make_run_dir(output_root: str | Path, run_id: str | None = None) -> Path:
    """Create a fresh run directory; timestamped unless an id is given."""
    root = Path(output_root)
    root.mkdir(parents=True, exist_ok=True)
    if run_id is None:
        stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime())
        candidate = root / stamp
        counter = 1
        while candidate.exists():
            counter += 1
            candidate = root / f"{stamp}-{counter}"
        run_id = candidate.name
    run_dir = root / run_id
    run_dir.mkdir(parents=True, exist_ok=False)
    return run_dir


@dataclass
class ReportBundle:
    """Accumulates named outputs under a run directory and seals a manifest."""

    run_dir: Path
    config: dict = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)

    def record_input(self, name: str, path: str | Path) -> None:
        self.inputs[name] = sha256_file(path)

    def record_output(self, relpath: str) -> None:
        """Register a file some other writer placed under the run dir."""
        self.outputs[relpath] = sha256_file(self.run_dir / relpath)

    def _write(self, relpath: str, text: str) -> Path:
        target = self.run_dir / relpath
        target.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode("utf-8")
        target.write_bytes(data)
        self.outputs[relpath] = sha256_bytes(data)
        return target

    def add_table(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        return self._write(f"tables/{name}.csv", render_table(header, rows))

    def add_text(self, relpath: str, text: str) -> Path:
        return self._write(relpath, text)

    def add_plot_series(self, name: str, series: Mapping) -> Path:
        return self._write(
            f"plots/{name}.json", json.dumps(series, sort_keys=True, indent=2) + "\n"
        )

    def finalize(self) -> dict:
        """Write the manifest last so it covers every emitted file."""
        manifest = {
            "tool": {"name": "workatlas", "version": __version__},
            "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        (self.run_dir / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        return manifest


# ---------------------------------------------------------------------------
# Table emitters
# ---------------------------------------------------------------------------

def emit_outcome_stats(bundle: ReportBundle, rows: Sequence[OutcomeStats]) -> None:
    bundle.add_table(
        "mapping_outcomes",
        ["taxonomy_kind", "benchmark", "total", "mapped", "empty", "invalid",
         "mapped_fraction", "empty_fraction", "invalid_fraction"],
        [
            (
                r.taxonomy_kind.value, r.benchmark, r.total, r.mapped, r.empty, r.invalid,
                r.fractions["mapped"], r.fractions["empty"], r.fractions["invalid"],
            )
            for r in rows
        ],
    )


def emit_coverage(bundle: ReportBundle, report: CoverageReport, corpus_label: str) -> None:
    rows = [("(pooled)", corpus_label, len(report.covered_paths), report.total_paths,
             report.coverage)]
    for bench, frac in report.per_benchmark.items():
        rows.append((bench, corpus_label, round(frac * report.total_paths), report.total_paths, frac))
    bundle.add_table(
        f"coverage_{report.taxonomy_kind.value}",
        ["benchmark", "corpus", "covered_paths", "total_paths", "coverage"],
        rows,
    )


def emit_effort(bundle: ReportBundle, effort: EffortDistribution) -> None:
    shares = effort.shares()
    bundle.add_table(
        f"effort_{effort.group_level.value}",
        ["node_id", "label", "count", "share"],
        [
            (node_id, effort.labels.get(node_id, ""), count, shares.get(node_id, 0.0))
            for node_id, count in effort.counts.items()
        ],
    )


def emit_breadth(bundle: ReportBundle, stats: BreadthStats) -> None:
    bundle.add_table(
        f"breadth_{stats.group_level.value}",
        ["breadth", "examples"],
        sorted(stats.histogram.items()),
    )
    bundle.add_table(
        f"breadth_{stats.group_level.value}_summary",
        ["share_zero", "share_exactly_one", "share_more_than_one",
         "share_more_than_three", "share_four_or_more", "mean_breadth"],
        [(stats.share_zero, stats.share_exactly_one, stats.share_more_than_one,
          stats.share_more_than_three, stats.share_four_or_more, stats.mean_breadth)],
    )


SENSITIVITY_HEADER = [
    "benchmark", "total", "stop_size_median", "stop_size_ci_low", "stop_size_ci_high",
    "domain_coverage_median", "domain_coverage_ci_low", "domain_coverage_ci_high",
    "skill_coverage_median", "skill_coverage_ci_low", "skill_coverage_ci_high",
    "domain_chao1_richness", "skill_chao1_richness",
    "domain_chao1_coverage_median", "skill_chao1_coverage_median",
]


def sensitivity_row(summary: SensitivitySummary) -> tuple:
    def stat(kind: TaxonomyKind, table: dict, attr: str) -> float:
        entry = table.get(kind)
        return getattr(entry, attr) if entry is not None else 0.0

    return (
        summary.benchmark,
        summary.pool_size,
        summary.stop_size.median, summary.stop_size.ci_low, summary.stop_size.ci_high,
        stat(TaxonomyKind.DOMAIN, summary.coverage_at_stop, "median"),
        stat(TaxonomyKind.DOMAIN, summary.coverage_at_stop, "ci_low"),
        stat(TaxonomyKind.DOMAIN, summary.coverage_at_stop, "ci_high"),
        stat(TaxonomyKind.SKILL, summary.coverage_at_stop, "median"),
        stat(TaxonomyKind.SKILL, summary.coverage_at_stop, "ci_low"),
        stat(TaxonomyKind.SKILL, summary.coverage_at_stop, "ci_high"),
        summary.chao1_richness.get(TaxonomyKind.DOMAIN, 0.0),
        summary.chao1_richness.get(TaxonomyKind.SKILL, 0.0),
        stat(TaxonomyKind.DOMAIN, summary.chao1_coverage, "median"),
        stat(TaxonomyKind.SKILL, summary.chao1_coverage, "median"),
    )


def emit_sensitivity(bundle: ReportBundle, summaries: Sequence[SensitivitySummary]) -> None:
    bundle.add_table(
        "sampling_sensitivity", SENSITIVITY_HEADER,
        [sensitivity_row(s) for s in summaries],
    )


def emit_family_econ(bundle: ReportBundle, table: FamilyEconTable) -> None:
    emp_shares = table.employment_shares()
    cap_shares = table.capital_shares()
    bundle.add_table(
        "family_economics",
        ["node_id", "label", "employment", "capital", "employment_share", "capital_share"],
        [
            (r.node_id, r.label, r.employment, r.capital,
             emp_shares.get(r.node_id, 0.0), cap_shares.get(r.node_id, 0.0))
            for r in table.rows
        ],
    )
    if table.unmatched_soc_codes:
        bundle.add_table(
            "unmatched_soc_codes", ["soc_code"],
            [(code,) for code in table.unmatched_soc_codes],
        )


def emit_skill_econ(bundle: ReportBundle, table: SkillEconTable) -> None:
    # effective_* columns are relative importance weights, not head-counts
    bundle.add_table(
        "skill_economics",
        ["node_id", "label", "level", "effective_employment", "effective_capital"],
        [
            (r.node_id, r.label, r.level, r.effective_employment, r.effective_capital)
            for r in table.rows
        ],
    )


def emit_digital(bundle: ReportBundle, table: DigitalShareTable) -> None:
    bundle.add_table(
        "digital_occupations",
        ["soc_code", "labeled_tasks", "digital_tasks", "digital_ratio"],
        [(r.soc_code, r.labeled_tasks, r.digital_tasks, r.ratio) for r in table.occupation_rows],
    )
    emp_shares = table.digital_employment_shares()
    bundle.add_table(
        "digital_families",
        ["node_id", "label", "digital_fraction", "digital_fraction_unweighted",
         "digital_employment", "digital_employment_share", "labeled_occupations"],
        [
            (r.node_id, r.label, r.digital_fraction, r.digital_fraction_unweighted,
             r.digital_employment, emp_shares.get(r.node_id, 0.0), r.labeled_occupations)
            for r in table.family_rows
        ],
    )
    if table.occupations_without_labels:
        bundle.add_table(
            "occupations_without_labels", ["soc_code"],
            [(code,) for code in table.occupations_without_labels],
        )


def emit_alignment(bundle: ReportBundle, report: AlignmentReport) -> None:
    bundle.add_table(
        f"alignment_{report.group_level.value}",
        ["node_id", "label", "effort_share", "employment_share", "capital_share",
         "digital_fraction", "digital_employment_share", "effort_to_employment_ratio"],
        [
            (r.node_id, r.label, r.effort_share, r.employment_share, r.capital_share,
             r.digital_fraction, r.digital_employment_share, r.effort_to_employment_ratio)
            for r in report.rows
        ],
    )


# ---------------------------------------------------------------------------
# Plot series
# ---------------------------------------------------------------------------

def effort_vs_employment_series(report: AlignmentReport) -> dict:
    return {
        "chart": "scatter",
        "x_axis": "employment_share",
        "y_axis": "effort_share",
        "points": [
            {
                "id": r.node_id,
                "label": r.label,
                "effort_share": r.effort_share,
                "employment_share": r.employment_share,
                "capital_share": r.capital_share,
                "digital_fraction": r.digital_fraction,
            }
            for r in report.rows
        ],
    }


def skill_distribution_series(report: AlignmentReport) -> dict:
    return {
        "chart": "bars",
        "x_axis": "skill_leaf",
        "series": ["effort_share", "employment_share"],
        "bars": [
            {
                "id": r.node_id,
                "label": r.label,
                "effort_share": r.effort_share,
                "employment_share": r.employment_share,
            }
            for r in report.rows
        ],
    }


def autonomy_heatmap_series(curves: Mapping[str, object]) -> dict:
    groups = sorted(curves)
    levels = sorted({k for g in groups for k in curves[g].levels})
    cells = []
    for g in groups:
        for k in levels:
            stats = curves[g].levels.get(k)
            if stats is not None:
                cells.append(
                    {"group": g, "level": k, "sr": stats.sr, "totals": stats.totals}
                )
    return {
        "chart": "heatmap",
        "rows": groups,
        "cols": levels,
        "value": "sr",
        "cells": cells,
    }


# ---------------------------------------------------------------------------
# Composite analytics used by the CLI `report` pipeline
# ---------------------------------------------------------------------------

def coverage_suite(
    bundle: ReportBundle,
    results_by_kind: Mapping[TaxonomyKind, Sequence[MappingResult]],
    taxonomies: Mapping[TaxonomyKind, Taxonomy],
    corpus_label: str,
) -> dict[TaxonomyKind, CoverageReport]:
    reports = {}
    summary: dict = {"corpus": corpus_label, "kinds": {}}
    for kind, taxonomy in taxonomies.items():
        results = list(results_by_kind.get(kind, []))
        report = coverage(results, taxonomy)
        reports[kind] = report
        emit_coverage(bundle, report, corpus_label)
        level = (
            GroupLevel.DOMAIN_FAMILY if kind is TaxonomyKind.DOMAIN else GroupLevel.SKILL_LEAF
        )
        breadth_stats = breadth(results, taxonomy, level)
        emit_effort(bundle, effort_by_node(results, taxonomy, level))
        emit_breadth(bundle, breadth_stats)
        summary["kinds"][kind.value] = {
            "covered_paths": len(report.covered_paths),
            "total_paths": report.total_paths,
            "coverage": report.coverage,
            "per_benchmark": report.per_benchmark,
            "breadth": {
                "share_zero": breadth_stats.share_zero,
                "share_exactly_one": breadth_stats.share_exactly_one,
                "share_more_than_one": breadth_stats.share_more_than_one,
                "share_more_than_three": breadth_stats.share_more_than_three,
                "share_four_or_more": breadth_stats.share_four_or_more,
                "mean_breadth": breadth_stats.mean_breadth,
            },
        }
    bundle.add_text(
        "coverage_summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n"
    )
    return reports


def alignment_suite(
    bundle: ReportBundle,
    results_by_kind: Mapping[TaxonomyKind, Sequence[MappingResult]],
    taxonomies: Mapping[TaxonomyKind, Taxonomy],
    family_econ: FamilyEconTable,
    skill_econ: SkillEconTable,
    digital: DigitalShareTable | None,
) -> None:
    domain_effort = effort_by_node(
        list(results_by_kind.get(TaxonomyKind.DOMAIN, [])),
        taxonomies[TaxonomyKind.DOMAIN],
        GroupLevel.DOMAIN_FAMILY,
    )
    domain_alignment = alignment_report(domain_effort, family_econ, digital)
    emit_alignment(bundle, domain_alignment)
    bundle.add_plot_series(
        "effort_vs_employment", effort_vs_employment_series(domain_alignment)
    )

    skill_effort = effort_by_node(
        list(results_by_kind.get(TaxonomyKind.SKILL, [])),
        taxonomies[TaxonomyKind.SKILL],
        GroupLevel.SKILL_LEAF,
    )
    skill_alignment = alignment_report(skill_effort, skill_econ)
    emit_alignment(bundle, skill_alignment)
    bundle.add_plot_series("skill_distribution", skill_distribution_series(skill_alignment))
