"""Command-line front end orchestrating the library modules.

Subcommands: ``map``, ``coverage``, ``sample``, ``economics``, ``autonomy``,
``advise``, ``report``. Every run writes into a fresh directory under
``--out`` and seals a manifest with content digests, so re-running with the
same inputs and ``--seed`` reproduces byte-identical tables.

Exit codes: 0 success, 2 configuration error, 3 input error, 4 annotator
failure, 5 internal error. The remote annotator reads its endpoint and
credential from ``ATLAS_ANNOTATOR_URL`` / ``ATLAS_ANNOTATOR_KEY``; all
other configuration arrives as flags or a ``--config`` JSON file whose keys
mirror the flag names (flags win).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .annotate import (
    Annotator,
    AnnotatorTransportError,
    KeywordAnnotator,
    RemoteAnnotator,
    ReplayAnnotator,
)
from .autonomy import advise as autonomy_advise
from .autonomy import autonomy_level, success_rates
from .coverage import ForeignPathError
from .economics import (
    digital_share,
    domain_employment_capital,
    effective_skill_employment_capital,
)
from .io import (
    InputFormatError,
    fixture_path,
    read_curves,
    read_digital_labels,
    read_examples,
    read_importance,
    read_mappings,
    read_occupations,
    read_raw_mappings,
    read_workflows,
    write_curves,
    write_mappings,
)
from .mapping import (
    CorpusError,
    CorpusMappingAborted,
    MappingResult,
    TaskExample,
    map_corpus,
    mapping_outcome_stats,
)
from .reporting import (
    ReportBundle,
    alignment_suite,
    autonomy_heatmap_series,
    coverage_suite,
    emit_digital,
    emit_family_econ,
    emit_outcome_stats,
    emit_sensitivity,
    emit_skill_econ,
    make_run_dir,
)
from .sampling import build_pool, permutation_sensitivity
from .taxonomy import Taxonomy, TaxonomyError, TaxonomyKind, load_taxonomy, resolve_path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_ANNOTATOR = 4
EXIT_INTERNAL = 5

_INPUT_ERRORS = (
    InputFormatError,
    TaxonomyError,
    ForeignPathError,
    CorpusError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
)

FIXTURE_DEFAULTS = {
    "examples": "examples.jsonl",
    "domain_taxonomy": "taxonomy_domain.json",
    "skill_taxonomy": "taxonomy_skill.json",
    "domain_rules": "keyword_rules_domain.json",
    "skill_rules": "keyword_rules_skill.json",
    "occupations": "occupations.csv",
    "importance": "importance.csv",
    "digital_labels": "digital_labels.csv",
    "workflows": "workflows.jsonl",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Merged configuration for one subcommand invocation."""

    command: str
    values: dict

    def __getattr__(self, name: str):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def path(self, name: str, required: bool = False) -> Path | None:
        value = self.values.get(name)
        if value is None:
            if required:
                raise ConfigError(f"missing required input --{name.replace('_', '-')}")
            return None
        p = Path(value)
        if not p.exists():
            raise FileNotFoundError(f"input file does not exist: {p}")
        return p


def _merge_config(args: argparse.Namespace, defaults: dict) -> RunConfig:
    """Precedence: explicit flag > config-file entry > default."""
    file_values = {}
    if getattr(args, "config", None):
        config_path = Path(args.config)
        if not config_path.exists():
            raise ConfigError(f"config file does not exist: {config_path}")
        try:
            file_values = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file is not valid JSON: {err}") from err
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
    values = dict(defaults)
    for key, value in file_values.items():
        values[key.replace("-", "_")] = value
    for key, value in vars(args).items():
        if key in ("command", "config", "handler"):
            continue
        if value is not None:
            values[key] = value
    if values.get("fixtures"):
        for key, name in FIXTURE_DEFAULTS.items():
            if values.get(key) is None:
                candidate = fixture_path(name)
                if candidate.exists():
                    values[key] = str(candidate)
    return RunConfig(command=args.command, values=values)


_PARAM_DEFAULTS = {
    "batch_size": 5,
    "delta": 0.1,
    "permutations": 500,
    "threshold": 0.8,
    "min_samples": 10,
    "confidence_mode": "raw",
    "seed": 0,
    "parallelism": 1,
    "annotator": "keyword",
    "group_by": "benchmark",
    "out": "runs",
    "fixtures": False,
}


# ---------------------------------------------------------------------------
# Input validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    file: str
    where: str
    reason: str


@dataclass
class ValidationReport:
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_inputs(config: RunConfig) -> ValidationReport:
    """Parse every referenced input and run cross-file referential checks.

    Violations are the report's content; this never raises for bad data.
    Checks: files parse; example keys unique with non-empty instructions;
    mapping paths resolve in the supplied taxonomies; occupation SOC codes
    are unique and known to the domain taxonomy; importance rows reference
    known SOC codes and activity ids; digital labels reference known SOC
    codes; workflow documents are well-formed trees.
    """
    violations: list[Violation] = []

    def check(name: str, loader):
        value = config.values.get(name)
        if value is None:
            return None
        try:
            return loader(Path(value))
        except Exception as err:  # any parse problem is a violation, not a crash
            violations.append(Violation(file=str(value), where="(file)", reason=str(err)))
            return None

    t_domain = check("domain_taxonomy", load_taxonomy)
    t_skill = check("skill_taxonomy", load_taxonomy)
    if t_domain is not None and t_domain.kind is not TaxonomyKind.DOMAIN:
        violations.append(
            Violation(str(config.values["domain_taxonomy"]), "(kind)", "expected a domain taxonomy")
        )
        t_domain = None
    if t_skill is not None and t_skill.kind is not TaxonomyKind.SKILL:
        violations.append(
            Violation(str(config.values["skill_taxonomy"]), "(kind)", "expected a skill taxonomy")
        )
        t_skill = None

    examples = check("examples", read_examples)
    if examples is not None:
        seen = set()
        for e in examples:
            if not e.instruction.strip():
                violations.append(
                    Violation(str(config.values["examples"]), f"{e.benchmark}/{e.example_id}",
                              "empty instruction")
                )
            if e.key in seen:
                violations.append(
                    Violation(str(config.values["examples"]), f"{e.benchmark}/{e.example_id}",
                              "duplicate (benchmark, example_id)")
                )
            seen.add(e.key)

    mappings_value = config.values.get("mappings")
    if mappings_value is not None and (t_domain is not None or t_skill is not None):
        taxonomies = {
            k: t
            for k, t in ((TaxonomyKind.DOMAIN, t_domain), (TaxonomyKind.SKILL, t_skill))
            if t is not None
        }
        try:
            read_mappings(Path(mappings_value), taxonomies)
        except InputFormatError as err:
            violations.append(Violation(str(mappings_value), f"line {err.line_no}", str(err)))

    occupations = check("occupations", read_occupations)
    soc_codes = set()
    if occupations is not None:
        for o in occupations:
            if o.soc_code in soc_codes:
                violations.append(
                    Violation(str(config.values["occupations"]), o.soc_code, "duplicate SOC code")
                )
            soc_codes.add(o.soc_code)
        if t_domain is not None:
            known = {
                occ.annotations.get("soc_code")
                for fam in t_domain.root.children
                for occ in fam.children
            }
            for o in occupations:
                if o.soc_code not in known:
                    violations.append(
                        Violation(str(config.values["occupations"]), o.soc_code,
                                  "SOC code not present in the domain taxonomy")
                    )

    importance = check("importance", read_importance)
    if importance is not None:
        known_activities = set()
        if t_skill is not None:
            for path in t_skill.path_index:
                activity = t_skill.node(path.node_ids[-1]).annotations.get("activity_id")
                if activity:
                    known_activities.add(activity)
        for record in importance.records:
            where = f"{record.soc_code}/{record.activity_id}"
            if soc_codes and record.soc_code not in soc_codes:
                violations.append(
                    Violation(str(config.values["importance"]), where, "unknown SOC code")
                )
            if t_skill is not None and record.activity_id not in known_activities:
                violations.append(
                    Violation(str(config.values["importance"]), where, "unknown activity_id")
                )

    labels = check("digital_labels", read_digital_labels)
    if labels is not None and soc_codes:
        for lab in labels:
            if lab.soc_code not in soc_codes:
                violations.append(
                    Violation(str(config.values["digital_labels"]), lab.soc_code,
                              "label references unknown SOC code")
                )

    check("workflows", read_workflows)
    return ValidationReport(violations=violations)


# ---------------------------------------------------------------------------
# Shared loading helpers
# ---------------------------------------------------------------------------

def _load_taxonomies(config: RunConfig, require: bool = True) -> dict[TaxonomyKind, Taxonomy]:
    taxonomies: dict[TaxonomyKind, Taxonomy] = {}
    for key, kind in (("domain_taxonomy", TaxonomyKind.DOMAIN),
                      ("skill_taxonomy", TaxonomyKind.SKILL)):
        path = config.path(key, required=require)
        if path is not None:
            t = load_taxonomy(path)
            if t.kind is not kind:
                raise ConfigError(f"{path} holds a {t.kind.value} taxonomy, expected {kind.value}")
            taxonomies[kind] = t
    if not taxonomies:
        raise ConfigError("at least one taxonomy is required")
    return taxonomies


def _build_annotator(config: RunConfig, kind: TaxonomyKind,
                     examples: Sequence[TaskExample]) -> Annotator:
    mode = config.values.get("annotator", "keyword")
    if mode == "keyword":
        key = "domain_rules" if kind is TaxonomyKind.DOMAIN else "skill_rules"
        rules = config.path(key, required=True)
        return KeywordAnnotator.from_file(rules)
    if mode == "replay":
        source = config.path("replay_mappings", required=True)
        records = [
            r for r in read_raw_mappings(source) if r["taxonomy_kind"] == kind.value
        ]

        class _Raw:
            __slots__ = ("benchmark", "example_id", "raw_annotator_output")

            def __init__(self, record):
                self.benchmark = record["benchmark"]
                self.example_id = record["example_id"]
                self.raw_annotator_output = record["raw"]

        return ReplayAnnotator.from_records(
            examples, [_Raw(r) for r in records], annotator_id=f"replay:{kind.value}"
        )
    if mode == "remote":
        try:
            return RemoteAnnotator()
        except ValueError as err:
            raise ConfigError(str(err)) from err
    raise ConfigError(f"unknown annotator {mode!r}")


def _start_bundle(config: RunConfig) -> ReportBundle:
    run_dir = make_run_dir(config.values.get("out", "runs"), config.values.get("run_id"))
    bundle = ReportBundle(run_dir=run_dir)
    bundle.config = {
        k: v for k, v in sorted(config.values.items())
        if k not in ("out", "run_id") and v is not None
    }
    bundle.config["command"] = config.command
    for key in ("examples", "mappings", "domain_taxonomy", "skill_taxonomy",
                "domain_rules", "skill_rules", "occupations", "importance",
                "digital_labels", "workflows", "curves", "replay_mappings"):
        value = config.values.get(key)
        if value is not None and Path(value).exists():
            bundle.record_input(key, value)
    return bundle


def _map_all_kinds(
    config: RunConfig,
    taxonomies: dict[TaxonomyKind, Taxonomy],
    examples: Sequence[TaskExample],
    bundle: ReportBundle,
) -> dict[TaxonomyKind, list[MappingResult]]:
    """Map the corpus against every loaded taxonomy, persisting as we go.

    On an aborted corpus the partial results are still written to the run
    directory before the error propagates.
    """
    results: dict[TaxonomyKind, list[MappingResult]] = {}
    flat: list[MappingResult] = []
    try:
        for kind, taxonomy in taxonomies.items():
            annotator = _build_annotator(config, kind, examples)
            mapped = map_corpus(
                examples, taxonomy, annotator,
                parallelism=int(config.values.get("parallelism", 1)),
            )
            results[kind] = mapped
            flat.extend(mapped)
    except CorpusMappingAborted as err:
        flat.extend(err.partial_results)
        write_mappings(bundle.run_dir / "mappings.partial.jsonl", flat)
        raise
    write_mappings(bundle.run_dir / "mappings.jsonl", flat)
    bundle.record_output("mappings.jsonl")
    emit_outcome_stats(bundle, mapping_outcome_stats(flat))
    return results


def _split_by_kind(results: Sequence[MappingResult]) -> dict[TaxonomyKind, list[MappingResult]]:
    out: dict[TaxonomyKind, list[MappingResult]] = {}
    for r in results:
        out.setdefault(r.taxonomy_kind, []).append(r)
    return out


def _sensitivity_rows(config: RunConfig, results: Sequence[MappingResult],
                      taxonomies: dict[TaxonomyKind, Taxonomy]):
    t_domain = taxonomies.get(TaxonomyKind.DOMAIN)
    t_skill = taxonomies.get(TaxonomyKind.SKILL)
    by_benchmark: dict[str, list[MappingResult]] = {}
    for r in results:
        by_benchmark.setdefault(r.benchmark, []).append(r)
    summaries = []
    for bench in sorted(by_benchmark):
        summaries.append(
            permutation_sensitivity(
                build_pool(by_benchmark[bench]), t_domain, t_skill,
                batch_size=int(config.values["batch_size"]),
                delta=float(config.values["delta"]),
                permutations=int(config.values["permutations"]),
                rng_seed=int(config.values["seed"]),
            )
        )
    if len(by_benchmark) > 1:
        summaries.append(
            permutation_sensitivity(
                build_pool(results), t_domain, t_skill,
                batch_size=int(config.values["batch_size"]),
                delta=float(config.values["delta"]),
                permutations=int(config.values["permutations"]),
                rng_seed=int(config.values["seed"]),
            )
        )
    return summaries


def _economics_suite(config: RunConfig, taxonomies, results_by_kind, bundle: ReportBundle):
    occupations = read_occupations(config.path("occupations", required=True))
    family_econ = domain_employment_capital(occupations, taxonomies[TaxonomyKind.DOMAIN])
    emit_family_econ(bundle, family_econ)

    skill_econ = None
    importance_path = config.path("importance")
    if importance_path is not None and TaxonomyKind.SKILL in taxonomies:
        importance = read_importance(importance_path)
        skill_econ = effective_skill_employment_capital(
            occupations, importance, taxonomies[TaxonomyKind.SKILL]
        )
        emit_skill_econ(bundle, skill_econ)

    digital = None
    labels_path = config.path("digital_labels")
    if labels_path is not None:
        labels = read_digital_labels(labels_path)
        digital = digital_share(labels, occupations, taxonomies[TaxonomyKind.DOMAIN])
        emit_digital(bundle, digital)

    if results_by_kind and skill_econ is not None:
        alignment_suite(bundle, results_by_kind, taxonomies, family_econ, skill_econ, digital)


def _autonomy_suite(config: RunConfig, bundle: ReportBundle):
    workflows = read_workflows(config.path("workflows", required=True))
    group_by = config.values.get("group_by", "benchmark")
    curves = success_rates(workflows, group_by)
    overall = success_rates(workflows, "overall")
    curves_path = bundle.run_dir / "tables" / "autonomy_curves.csv"
    curves_path.parent.mkdir(parents=True, exist_ok=True)
    write_curves(curves_path, {**curves, **overall})
    bundle.record_output("tables/autonomy_curves.csv")

    threshold = float(config.values["threshold"])
    min_samples = int(config.values["min_samples"])
    mode = config.values.get("confidence_mode", "raw")
    assessed = {
        g: autonomy_level(c, threshold, min_samples, mode)
        for g, c in {**curves, **overall}.items()
    }
    bundle.add_table(
        "autonomy_levels",
        ["group", "autonomy_level", "threshold", "min_samples", "confidence_mode",
         "non_monotonic_levels"],
        [
            (g, c.autonomy if c.autonomy is not None else "none", threshold, min_samples,
             mode, " ".join(str(k) for k in c.non_monotonic_levels))
            for g, c in sorted(assessed.items())
        ],
    )
    bundle.add_plot_series("autonomy_heatmap", autonomy_heatmap_series({**curves, **overall}))


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_map(config: RunConfig) -> int:
    taxonomies = _load_taxonomies(config)
    examples = read_examples(config.path("examples", required=True))
    bundle = _start_bundle(config)
    results = _map_all_kinds(config, taxonomies, examples, bundle)
    for kind, mapped in results.items():
        pooled = [r for r in mapping_outcome_stats(mapped) if r.benchmark == "(all)"][0]
        print(f"{kind.value}: {pooled.mapped} mapped / {pooled.empty} empty / "
              f"{pooled.invalid} invalid of {pooled.total}")
    bundle.finalize()
    print(f"mapped {len(examples)} examples -> {bundle.run_dir}")
    return EXIT_OK


def _cmd_coverage(config: RunConfig) -> int:
    taxonomies = _load_taxonomies(config, require=False)
    mappings_path = config.path("mappings", required=True)
    results = read_mappings(mappings_path, taxonomies)
    bundle = _start_bundle(config)
    coverage_suite(bundle, _split_by_kind(results), taxonomies, corpus_label=str(mappings_path))
    bundle.finalize()
    print(f"coverage tables -> {bundle.run_dir}")
    return EXIT_OK


def _cmd_sample(config: RunConfig) -> int:
    taxonomies = _load_taxonomies(config, require=False)
    results = read_mappings(config.path("mappings", required=True), taxonomies)
    bundle = _start_bundle(config)
    emit_sensitivity(bundle, _sensitivity_rows(config, results, taxonomies))
    bundle.finalize()
    print(f"sampling sensitivity -> {bundle.run_dir}")
    return EXIT_OK


def _cmd_economics(config: RunConfig) -> int:
    taxonomies = _load_taxonomies(config)
    results_by_kind: dict[TaxonomyKind, list[MappingResult]] = {}
    mappings_path = config.path("mappings")
    if mappings_path is not None:
        results_by_kind = _split_by_kind(read_mappings(mappings_path, taxonomies))
    bundle = _start_bundle(config)
    _economics_suite(config, taxonomies, results_by_kind, bundle)
    bundle.finalize()
    print(f"economics tables -> {bundle.run_dir}")
    return EXIT_OK


def _cmd_autonomy(config: RunConfig) -> int:
    bundle = _start_bundle(config)
    _autonomy_suite(config, bundle)
    bundle.finalize()
    print(f"autonomy tables -> {bundle.run_dir}")
    return EXIT_OK


def _cmd_advise(config: RunConfig) -> int:
    curves = read_curves(config.path("curves", required=True))
    instruction = config.values.get("instruction")
    if not instruction:
        raise ConfigError("--instruction is required")
    task = TaskExample(
        benchmark=config.values.get("benchmark", "adhoc"),
        example_id=config.values.get("example_id", "query"),
        instruction=instruction,
    )
    groups_value = config.values.get("groups")
    if groups_value:
        groups = [g.strip() for g in str(groups_value).split(",") if g.strip()]
        matcher = lambda _task: groups  # noqa: E731
    else:
        taxonomies = _load_taxonomies(config, require=False)
        if TaxonomyKind.DOMAIN not in taxonomies:
            raise ConfigError("either --groups or a domain taxonomy with rules is required")
        t_domain = taxonomies[TaxonomyKind.DOMAIN]
        annotator = _build_annotator(config, TaxonomyKind.DOMAIN, [task])
        from .annotate import parse_candidates
        from .taxonomy import PathResolutionError

        def matcher(t: TaskExample) -> list[str]:
            sequences, _ = parse_candidates(annotator.annotate(t.instruction, ""))
            families = []
            for seq in sequences:
                try:
                    families.append(resolve_path(t_domain, seq).labels[0])
                except PathResolutionError:
                    continue
            return sorted(set(families))

    complexity_estimate = config.values.get("complexity")
    if complexity_estimate is None:
        raise ConfigError("--complexity is required (the advisor never invents one)")
    try:
        advice = autonomy_advise(
            task,
            float(config.values["threshold"]),
            curves,
            matcher,
            int(complexity_estimate),
            min_samples=int(config.values["min_samples"]),
            confidence_mode=config.values.get("confidence_mode", "raw"),
        )
    except ValueError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    record = {
        "benchmark": advice.benchmark,
        "example_id": advice.example_id,
        "matched_groups": list(advice.matched_groups),
        "estimated_complexity": advice.estimated_complexity,
        "threshold": advice.threshold,
        "decision": advice.decision.value,
        "consulted": [
            {"group": c.group_key, "level": c.level, "sr": c.sr,
             "totals": c.totals, "passed": c.passed}
            for c in advice.consulted
        ],
    }
    text = json.dumps(record, sort_keys=True, indent=2)
    print(text)
    bundle = _start_bundle(config)
    bundle.add_text("advice.json", text + "\n")
    bundle.finalize()
    return EXIT_OK


def _cmd_report(config: RunConfig) -> int:
    validation = validate_inputs(config)
    if not validation.ok:
        for v in validation.violations:
            print(f"input violation: {v.file} [{v.where}]: {v.reason}", file=sys.stderr)
        return EXIT_INPUT
    taxonomies = _load_taxonomies(config)
    examples = read_examples(config.path("examples", required=True))
    bundle = _start_bundle(config)
    results_by_kind = _map_all_kinds(config, taxonomies, examples, bundle)
    flat = [r for rs in results_by_kind.values() for r in rs]
    coverage_suite(bundle, results_by_kind, taxonomies,
                   corpus_label=str(config.values["examples"]))
    emit_sensitivity(bundle, _sensitivity_rows(config, flat, taxonomies))
    if config.values.get("occupations"):
        _economics_suite(config, taxonomies, results_by_kind, bundle)
    if config.values.get("workflows"):
        _autonomy_suite(config, bundle)
    bundle.finalize()
    print(f"report bundle -> {bundle.run_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workatlas",
        description="Benchmark-to-work-taxonomy measurement toolkit",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; keys mirror flag names")
        p.add_argument("--out", help="output root (default: runs)")
        p.add_argument("--run-id", dest="run_id", help="run directory name (default: timestamp)")
        p.add_argument("--seed", type=int, help="master random seed (default: 0)")
        p.add_argument("--fixtures", action="store_true", default=None,
                       help="fill unset inputs from the bundled fixture data")

    def taxonomy_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--domain-taxonomy", dest="domain_taxonomy")
        p.add_argument("--skill-taxonomy", dest="skill_taxonomy")

    def annotator_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--annotator", choices=["keyword", "replay", "remote"])
        p.add_argument("--domain-rules", dest="domain_rules",
                       help="keyword rules file for the domain taxonomy")
        p.add_argument("--skill-rules", dest="skill_rules",
                       help="keyword rules file for the skill taxonomy")
        p.add_argument("--replay-mappings", dest="replay_mappings",
                       help="recorded mappings file for the replay annotator")
        p.add_argument("--parallelism", type=int)

    p_map = sub.add_parser("map", help="map examples onto the taxonomies")
    common(p_map); taxonomy_flags(p_map); annotator_flags(p_map)
    p_map.add_argument("--examples")
    p_map.set_defaults(handler=_cmd_map)

    p_cov = sub.add_parser("coverage", help="coverage/effort/breadth from mappings")
    common(p_cov); taxonomy_flags(p_cov)
    p_cov.add_argument("--mappings")
    p_cov.set_defaults(handler=_cmd_coverage)

    p_sample = sub.add_parser("sample", help="saturation-sampling sensitivity analysis")
    common(p_sample); taxonomy_flags(p_sample)
    p_sample.add_argument("--mappings")
    p_sample.add_argument("--batch-size", dest="batch_size", type=int)
    p_sample.add_argument("--delta", type=float)
    p_sample.add_argument("--permutations", type=int)
    p_sample.set_defaults(handler=_cmd_sample)

    p_econ = sub.add_parser("economics", help="employment/capital/digital tables")
    common(p_econ); taxonomy_flags(p_econ)
    p_econ.add_argument("--occupations")
    p_econ.add_argument("--importance")
    p_econ.add_argument("--digital-labels", dest="digital_labels")
    p_econ.add_argument("--mappings", help="optional; enables the alignment tables")
    p_econ.set_defaults(handler=_cmd_economics)

    p_auto = sub.add_parser("autonomy", help="success-rate curves and autonomy levels")
    common(p_auto)
    p_auto.add_argument("--workflows")
    p_auto.add_argument("--group-by", dest="group_by",
                        help="overall | benchmark | agent | model (default: benchmark)")
    p_auto.add_argument("--threshold", type=float)
    p_auto.add_argument("--min-samples", dest="min_samples", type=int)
    p_auto.add_argument("--confidence-mode", dest="confidence_mode", choices=["raw", "lcb"])
    p_auto.set_defaults(handler=_cmd_autonomy)

    p_advise = sub.add_parser("advise", help="delegate-or-decompose advice for one task")
    common(p_advise); taxonomy_flags(p_advise); annotator_flags(p_advise)
    p_advise.add_argument("--curves", help="curve CSV exported by the autonomy subcommand")
    p_advise.add_argument("--instruction")
    p_advise.add_argument("--benchmark")
    p_advise.add_argument("--example-id", dest="example_id")
    p_advise.add_argument("--complexity", type=int)
    p_advise.add_argument("--groups", help="comma-separated curve groups (skips mapping)")
    p_advise.add_argument("--threshold", type=float)
    p_advise.add_argument("--min-samples", dest="min_samples", type=int)
    p_advise.add_argument("--confidence-mode", dest="confidence_mode", choices=["raw", "lcb"])
    p_advise.set_defaults(handler=_cmd_advise)

    p_report = sub.add_parser("report", help="full pipeline over one input set")
    common(p_report); taxonomy_flags(p_report); annotator_flags(p_report)
    p_report.add_argument("--examples")
    p_report.add_argument("--occupations")
    p_report.add_argument("--importance")
    p_report.add_argument("--digital-labels", dest="digital_labels")
    p_report.add_argument("--workflows")
    p_report.add_argument("--batch-size", dest="batch_size", type=int)
    p_report.add_argument("--delta", type=float)
    p_report.add_argument("--permutations", type=int)
    p_report.add_argument("--threshold", type=float)
    p_report.add_argument("--min-samples", dest="min_samples", type=int)
    p_report.add_argument("--confidence-mode", dest="confidence_mode", choices=["raw", "lcb"])
    p_report.add_argument("--group-by", dest="group_by")
    p_report.set_defaults(handler=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "command", None) is None or not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        config = _merge_config(args, _PARAM_DEFAULTS)
        return args.handler(config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _INPUT_ERRORS as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (AnnotatorTransportError, CorpusMappingAborted) as err:
        print(f"annotator failure: {err}", file=sys.stderr)
        return EXIT_ANNOTATOR
    except Exception as err:  # pragma: no cover - safety net
        print(f"internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
