"""
Touring the occupational taxonomies
===================================

The bundled miniature trees mirror the real structure: a domain tree
(root > job family > occupation > task) and a skill tree (root > activity
category > activity group > detailed activity). Leaves always sit three
levels below the root, so every path is a triple of labels.
"""

from workatlas import all_paths, flatten_for_prompt, load_taxonomy, resolve_path
from workatlas.io import fixture_path
from workatlas.taxonomy import PartialPathError, UnknownPathError

# Loading validates everything: unique ids, uniform leaf depth, SOC codes
# only on the occupation layer.
domain = load_taxonomy(fixture_path("taxonomy_domain.json"))
skill = load_taxonomy(fixture_path("taxonomy_skill.json"))

print("domain tree:", len(domain.root.children), "families,",
      len(domain.nodes_at_level(2)), "occupations,", domain.leaf_count, "task leaves")
print("skill tree: ", len(skill.root.children), "categories,",
      len(skill.nodes_at_level(2)), "groups,", skill.leaf_count, "activities")

# Every root-to-leaf path appears exactly once in the index.
paths = sorted(all_paths(domain), key=str)
print("\nfirst three domain paths:")
for path in paths[:3]:
    print("  ", path)

# Label matching is canonical: case and extra whitespace do not matter.
path = resolve_path(domain, ["business AND financial operations", "ACCOUNTANTS",
                             "prepare  adjusting journal entries"])
print("\nresolved despite messy labels ->", path.node_ids)

# A sequence stopping at a non-leaf is rejected as a *partial* path, which
# is a different failure from naming something that does not exist.
try:
    resolve_path(skill, ["Information Input"])
except PartialPathError as err:
    print("partial path rejected:", err)
try:
    resolve_path(domain, ["Nonexistent Family", "X", "Y"])
except UnknownPathError as err:
    print("unknown path rejected:", err)

# The flattened rendering is what annotators receive alongside each task
# instruction; it is deterministic down to the byte.
text = flatten_for_prompt(skill)
print("\nflattened skill taxonomy (first 6 lines):")
for line in text.splitlines()[:6]:
    print("  ", line)
assert flatten_for_prompt(skill) == text
