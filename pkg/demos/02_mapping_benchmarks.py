"""
Mapping benchmark tasks onto the taxonomies
===========================================

Each task instruction goes to an annotator together with the flattened
taxonomy; the annotator returns candidate label sequences, and every
candidate is validated against the tree before it is kept. A task ends up
``mapped`` (at least one candidate resolved), ``empty`` (no candidates), or
``invalid`` (candidates present, none resolvable).

The bundled corpus uses a deterministic keyword annotator, so this whole
walkthrough reproduces bit-for-bit.
"""

from workatlas import (
    KeywordAnnotator,
    load_taxonomy,
    map_corpus,
    mapping_outcome_stats,
    score_against_reference,
)
from workatlas.io import fixture_path, read_examples
from workatlas.mapping import POOLED

domain = load_taxonomy(fixture_path("taxonomy_domain.json"))
examples = read_examples(fixture_path("examples.jsonl"))
annotator = KeywordAnnotator.from_file(fixture_path("keyword_rules_domain.json"))

results = map_corpus(examples, domain, annotator, parallelism=4)

print("corpus of", len(examples), "examples across 3 benchmarks")
for result in results[:3]:
    print(f"  {result.example_id}: {result.status.value:7s}",
          [str(p) for p in sorted(result.paths, key=str)])

# One task names only an occupation the miniature tree does not contain, so
# its only candidate fails resolution -> invalid, never silently dropped.
invalid = next(r for r in results if r.status.value == "invalid")
print("\ninvalid example", invalid.example_id, "raw output kept verbatim:",
      invalid.raw_annotator_output)

print("\noutcome fractions per benchmark:")
for row in mapping_outcome_stats(results):
    marker = "*" if row.benchmark == POOLED else " "
    fractions = row.fractions
    print(f" {marker} {row.taxonomy_kind.value}/{row.benchmark:10s}"
          f" mapped={fractions['mapped']:.2f} empty={fractions['empty']:.2f}"
          f" invalid={fractions['invalid']:.2f}  (n={row.total})")

# Mapping quality is graded against references with a four-way rubric:
# equal sets, disjoint sets, strict subset, strict superset.
reference = next(r for r in results if r.example_id == "c05").paths
predicted = frozenset(list(reference)[:1])
print("\nrubric on a deliberately incomplete prediction:",
      score_against_reference(predicted, reference).verdict.value)
