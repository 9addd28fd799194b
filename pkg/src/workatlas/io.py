"""Readers and writers for the toolkit's file formats.

Line-oriented JSON for examples, mappings, and workflows; CSV for the
economics tables and curve exports. Mappings persist paths as label
sequences so files stay meaningful without the taxonomy at hand; reading
them back re-resolves every path, which doubles as a validation pass.
All files are UTF-8. Writers never mutate existing files in place.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .autonomy import AutonomyCurve, LevelStats, WorkflowNode, workflow_from_document
from .economics import (
    DigitalLabel,
    ImportanceRecord,
    ImportanceTable,
    OccupationStats,
    WorkMode,
)
from .mapping import MappingResult, MappingStatus, TaskExample
from .taxonomy import Taxonomy, TaxonomyKind, resolve_path

SCALE_MAX_PREFIX = "# scale_max:"


class InputFormatError(ValueError):
    """A data file does not conform to its documented schema."""

    def __init__(self, path, line_no: int | None, reason: str):
        self.path = str(path)
        self.line_no = line_no
        where = f"{path}:{line_no}" if line_no is not None else str(path)
        super().__init__(f"{where}: {reason}")


def _iter_jsonl(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as err:
                raise InputFormatError(path, line_no, f"invalid JSON: {err}") from err


# ---------------------------------------------------------------------------
# Examples
# ---------------------------------------------------------------------------

def read_examples(path: str | Path) -> list[TaskExample]:
    """Read a JSONL examples file: {benchmark, example_id, instruction, metadata?}."""
    examples = []
    for line_no, record in _iter_jsonl(path):
        for key in ("benchmark", "example_id", "instruction"):
            if key not in record:
                raise InputFormatError(path, line_no, f"example record missing {key!r}")
        examples.append(
            TaskExample(
                benchmark=record["benchmark"],
                example_id=record["example_id"],
                instruction=record["instruction"],
                metadata=record.get("metadata", {}),
            )
        )
    return examples


def write_examples(path: str | Path, examples: Iterable[TaskExample]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for e in examples:
            record = {
                "benchmark": e.benchmark,
                "example_id": e.example_id,
                "instruction": e.instruction,
            }
            if e.metadata:
                record["metadata"] = e.metadata
            fh.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Mappings
# ---------------------------------------------------------------------------

def write_mappings(path: str | Path, results: Iterable[MappingResult]) -> None:
    """Persist mapping results, one record per line, paths as label lists."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in results:
            record = {
                "benchmark": r.benchmark,
                "example_id": r.example_id,
                "taxonomy_kind": r.taxonomy_kind.value,
                "status": r.status.value,
                "paths": sorted(list(p.labels) for p in r.paths),
                "annotator_id": r.annotator_id,
                "raw": r.raw_annotator_output,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_mappings(
    path: str | Path, taxonomies: dict[TaxonomyKind, Taxonomy]
) -> list[MappingResult]:
    """Read mapping records, re-resolving every persisted path.

    Re-resolution failing on a persisted path means the file and taxonomy
    disagree; that is surfaced as an :class:`InputFormatError` rather than
    silently skipped.
    """
    results = []
    for line_no, record in _iter_jsonl(path):
        for key in ("benchmark", "example_id", "taxonomy_kind", "status", "paths"):
            if key not in record:
                raise InputFormatError(path, line_no, f"mapping record missing {key!r}")
        try:
            kind = TaxonomyKind(record["taxonomy_kind"])
            status = MappingStatus(record["status"])
        except ValueError as err:
            raise InputFormatError(path, line_no, str(err)) from err
        taxonomy = taxonomies.get(kind)
        if taxonomy is None:
            raise InputFormatError(path, line_no, f"no taxonomy supplied for kind {kind.value}")
        try:
            paths = frozenset(resolve_path(taxonomy, labels) for labels in record["paths"])
        except ValueError as err:
            raise InputFormatError(
                path,
                line_no,
                f"example {record['benchmark']}/{record['example_id']}: {err}",
            ) from err
        try:
            results.append(
                MappingResult(
                    benchmark=record["benchmark"],
                    example_id=record["example_id"],
                    taxonomy_kind=kind,
                    paths=paths,
                    status=status,
                    raw_annotator_output=record.get("raw", ""),
                    annotator_id=record.get("annotator_id", "unknown"),
                )
            )
        except ValueError as err:
            raise InputFormatError(path, line_no, str(err)) from err
    return results


def read_raw_mappings(path: str | Path) -> list[dict]:
    """Read mapping records without resolving paths (for replay annotators)."""
    records = []
    for line_no, record in _iter_jsonl(path):
        for key in ("benchmark", "example_id", "taxonomy_kind", "raw"):
            if key not in record:
                raise InputFormatError(path, line_no, f"mapping record missing {key!r}")
        records.append(record)
    return records


# ---------------------------------------------------------------------------
# Economics inputs
# ---------------------------------------------------------------------------

def read_occupations(path: str | Path) -> list[OccupationStats]:
    """Read the occupations CSV: soc_code,title,employment,median_wage."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"soc_code", "title", "employment", "median_wage"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise InputFormatError(path, 1, f"header must contain {sorted(expected)}")
        for line_no, record in enumerate(reader, start=2):
            try:
                rows.append(
                    OccupationStats(
                        soc_code=record["soc_code"],
                        title=record["title"],
                        employment=float(record["employment"]),
                        median_wage=float(record["median_wage"]),
                    )
                )
            except (TypeError, ValueError) as err:
                raise InputFormatError(path, line_no, str(err)) from err
    return rows


def read_importance(path: str | Path) -> ImportanceTable:
    """Read the importance CSV; the scale maximum comes from a leading
    ``# scale_max: <value>`` comment line."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith(SCALE_MAX_PREFIX):
            raise InputFormatError(
                path, 1, f"first line must declare the scale, e.g. '{SCALE_MAX_PREFIX} 5.0'"
            )
        try:
            scale_max = float(first[len(SCALE_MAX_PREFIX):].strip())
        except ValueError as err:
            raise InputFormatError(path, 1, f"bad scale_max value: {err}") from err
        reader = csv.DictReader(fh)
        expected = {"soc_code", "activity_id", "importance"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise InputFormatError(path, 2, f"header must contain {sorted(expected)}")
        records = []
        for line_no, record in enumerate(reader, start=3):
            try:
                records.append(
                    ImportanceRecord(
                        soc_code=record["soc_code"],
                        activity_id=record["activity_id"],
                        importance=float(record["importance"]),
                    )
                )
            except (TypeError, ValueError) as err:
                raise InputFormatError(path, line_no, str(err)) from err
    try:
        return ImportanceTable(records=tuple(records), scale_max=scale_max)
    except ValueError as err:
        raise InputFormatError(path, None, str(err)) from err


def read_digital_labels(path: str | Path) -> list[DigitalLabel]:
    """Read the digital labels CSV: soc_code,task_hash,label,justification.

    Only the task hash is persisted, so loaded labels carry it verbatim and
    leave ``task_text`` empty.
    """
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"soc_code", "task_hash", "label"}
        if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
            raise InputFormatError(path, 1, f"header must contain {sorted(expected)}")
        for line_no, record in enumerate(reader, start=2):
            try:
                label = WorkMode(record["label"])
            except ValueError as err:
                raise InputFormatError(path, line_no, str(err)) from err
            rows.append(
                DigitalLabel(
                    soc_code=record["soc_code"],
                    task_text="",
                    label=label,
                    justification=record.get("justification", ""),
                    task_hash=record["task_hash"],
                )
            )
    return rows


def write_digital_labels(path: str | Path, labels: Iterable[DigitalLabel]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["soc_code", "task_hash", "label", "justification"])
        for lab in labels:
            writer.writerow([lab.soc_code, lab.task_hash, lab.label.value, lab.justification])


# ---------------------------------------------------------------------------
# Workflows
# ---------------------------------------------------------------------------

def read_workflows(path: str | Path) -> list[WorkflowNode]:
    """Read a JSONL workflow corpus, one trajectory document per line."""
    workflows = []
    for line_no, record in _iter_jsonl(path):
        try:
            workflows.append(workflow_from_document(record))
        except ValueError as err:
            raise InputFormatError(path, line_no, str(err)) from err
    return workflows


def write_workflows(path: str | Path, workflows: Iterable[WorkflowNode]) -> None:
    def node_doc(node: WorkflowNode) -> dict:
        doc = {"id": node.id, "description": node.description, "status": node.status}
        if node.children:
            doc["children"] = [node_doc(c) for c in node.children]
        return doc

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for root in workflows:
            record = dict(root.metadata)
            record["root"] = node_doc(root)
            fh.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Autonomy curves
# ---------------------------------------------------------------------------

CURVE_HEADER = ["group", "level", "successes", "totals", "sr", "lcb"]


def write_curves(path: str | Path, curves: dict[str, AutonomyCurve]) -> None:
    """Export curves as CSV rows (group, level, successes, totals, sr, lcb)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        for group in sorted(curves):
            curve = curves[group]
            for level in sorted(curve.levels):
                stats = curve.levels[level]
                writer.writerow(
                    [group, level, stats.successes, stats.totals, repr(stats.sr), repr(stats.lcb)]
                )


def read_curves(path: str | Path) -> dict[str, AutonomyCurve]:
    """Read a curve CSV back; sr/lcb are recomputed from the counts."""
    levels: dict[str, dict[int, LevelStats]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not set(CURVE_HEADER[:4]).issubset(reader.fieldnames):
            raise InputFormatError(path, 1, f"header must contain {CURVE_HEADER[:4]}")
        for line_no, record in enumerate(reader, start=2):
            try:
                group = record["group"]
                level = int(record["level"])
                stats = LevelStats(
                    successes=int(record["successes"]), totals=int(record["totals"])
                )
            except (TypeError, ValueError) as err:
                raise InputFormatError(path, line_no, str(err)) from err
            levels.setdefault(group, {})[level] = stats
    return {
        g: AutonomyCurve(group_key=g, levels=dict(sorted(ls.items())))
        for g, ls in levels.items()
    }


# ---------------------------------------------------------------------------
# Generic CSV table writing (used by reports)
# ---------------------------------------------------------------------------

def fixture_path(name: str) -> Path:
    """Path to a bundled fixture data file (miniature taxonomies, corpus)."""
    from importlib import resources

    return Path(str(resources.files("workatlas").joinpath("data", name)))


def format_cell(value) -> str:
    """Stable cell rendering: floats via repr so re-runs are byte-identical."""
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def render_table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).write_text(render_table(header, rows), encoding="utf-8")
