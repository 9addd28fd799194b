"""Labeled occupational taxonomy trees and their root-to-leaf paths.

Two taxonomy kinds are supported: a ``domain`` tree (root, job family,
occupation, task requirement) and a ``skill`` tree (root plus three work
activity layers of increasing granularity). Both place their leaves exactly
three levels below the root, so every path is a triple of labels.

Taxonomies are immutable once loaded and safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Mapping, Sequence


class TaxonomyKind(str, Enum):
    DOMAIN = "domain"
    SKILL = "skill"


#: Leaves of both taxonomy kinds sit at this depth (root = level 0).
LEAF_LEVEL = 3


class TaxonomyError(ValueError):
    """Base class for taxonomy document problems."""


class TaxonomySchemaError(TaxonomyError):
    """The document is malformed (missing fields, wrong types, bad kind)."""


class TaxonomyStructureError(TaxonomyError):
    """The tree violates a structural invariant (duplicate id, wrong depth)."""

    def __init__(self, node_id: str, reason: str):
        self.node_id = node_id
        self.reason = reason
        super().__init__(f"node {node_id!r}: {reason}")


class PathResolutionError(ValueError):
    """A label sequence does not name a root-to-leaf path."""


class UnknownPathError(PathResolutionError):
    """No node matches some label, or the labels are mis-ordered."""


class PartialPathError(PathResolutionError):
    """The labels form a valid prefix but stop at a non-leaf node."""


def canonical_label(label: str) -> str:
    """Case-folded, whitespace-collapsed form used for label matching."""
    return " ".join(label.split()).casefold()


@dataclass
class TaxonomyNode:
    """One labeled node; ``annotations`` may carry a SOC code (domain
    occupations) or an activity id (skill leaves)."""

    id: str
    label: str
    level: int
    children: tuple["TaxonomyNode", ...] = ()
    annotations: Mapping[str, str] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class TaxonomyPath:
    """A root-to-leaf path, stored from root child down to the leaf.

    Node ids are the identity; labels are carried along because mappings
    are persisted and exchanged as label sequences.
    """

    taxonomy_kind: TaxonomyKind
    node_ids: tuple[str, ...]
    labels: tuple[str, ...] = field(compare=False)

    def __str__(self) -> str:
        return " > ".join(self.labels)


@dataclass
class Taxonomy:
    """A validated taxonomy tree plus its enumerated path index."""

    kind: TaxonomyKind
    root: TaxonomyNode
    path_index: frozenset[TaxonomyPath]

    # internal lookup tables built by load_taxonomy
    _nodes_by_id: dict[str, TaxonomyNode] = field(default_factory=dict, repr=False)
    _paths_by_labels: dict[tuple[str, ...], TaxonomyPath] = field(
        default_factory=dict, repr=False
    )
    _children_by_label: dict[str, dict[str, TaxonomyNode]] = field(
        default_factory=dict, repr=False
    )

    @property
    def leaf_count(self) -> int:
        return len(self.path_index)

    def node(self, node_id: str) -> TaxonomyNode:
        return self._nodes_by_id[node_id]

    def nodes_at_level(self, level: int) -> list[TaxonomyNode]:
        """Nodes at a given depth, in document order."""
        out: list[TaxonomyNode] = []
        stack = [self.root]
        while stack:
            n = stack.pop()
            if n.level == level:
                out.append(n)
            else:
                stack.extend(reversed(n.children))
        return out

    def contains_path(self, path: TaxonomyPath) -> bool:
        return path in self.path_index


def _parse_node(doc: object, level: int, where: str) -> TaxonomyNode:
    if not isinstance(doc, dict):
        raise TaxonomySchemaError(f"{where}: node must be an object, got {type(doc).__name__}")
    for key in ("id", "label"):
        if key not in doc or not isinstance(doc[key], str) or not doc[key]:
            raise TaxonomySchemaError(f"{where}: missing or empty {key!r}")
    if level > LEAF_LEVEL:
        # fail fast instead of recursing into an over-deep document
        raise TaxonomyStructureError(
            doc["id"], f"node at level {level} exceeds maximum depth {LEAF_LEVEL}"
        )
    annotations = doc.get("annotations", {})
    if not isinstance(annotations, dict):
        raise TaxonomySchemaError(f"{where}: annotations must be an object")
    raw_children = doc.get("children", [])
    if not isinstance(raw_children, list):
        raise TaxonomySchemaError(f"{where}: children must be an array")
    children = tuple(
        _parse_node(c, level + 1, f"{where}.children[{i}]")
        for i, c in enumerate(raw_children)
    )
    return TaxonomyNode(
        id=doc["id"],
        label=doc["label"],
        level=level,
        children=children,
        annotations=dict(annotations),
    )


def _iter_nodes(root: TaxonomyNode) -> Iterator[TaxonomyNode]:
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def load_taxonomy(source: Mapping | str | Path) -> Taxonomy:
    """Load and validate a taxonomy document.

    Parameters
    ----------
    source : mapping, str, or Path
        Either an already-parsed document or a path to a UTF-8 JSON file
        with fields ``{kind, root: {id, label, annotations?, children}}``.

    Returns
    -------
    Taxonomy
        Fully validated, with ``path_index`` populated.

    Raises
    ------
    TaxonomySchemaError
        If the document is malformed.
    TaxonomyStructureError
        If the tree breaks an invariant; carries the offending node id.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source
    if not isinstance(doc, dict):
        raise TaxonomySchemaError("document must be a JSON object")
    try:
        kind = TaxonomyKind(doc.get("kind"))
    except ValueError:
        raise TaxonomySchemaError(
            f"kind must be one of {[k.value for k in TaxonomyKind]}, got {doc.get('kind')!r}"
        ) from None
    if "root" not in doc:
        raise TaxonomySchemaError("document missing 'root'")

    root = _parse_node(doc["root"], 0, "root")
    if root.is_leaf:
        raise TaxonomyStructureError(root.id, "taxonomy must have at least one leaf below root")

    nodes_by_id: dict[str, TaxonomyNode] = {}
    for node in _iter_nodes(root):
        if node.id in nodes_by_id:
            raise TaxonomyStructureError(node.id, "duplicate node id")
        nodes_by_id[node.id] = node
        if node.is_leaf and node.level != LEAF_LEVEL:
            raise TaxonomyStructureError(
                node.id, f"leaf at level {node.level}, expected {LEAF_LEVEL}"
            )
        if node.level > LEAF_LEVEL:
            raise TaxonomyStructureError(
                node.id, f"node at level {node.level} exceeds maximum depth {LEAF_LEVEL}"
            )
        if "soc_code" in node.annotations:
            if kind is not TaxonomyKind.DOMAIN or node.level != 2:
                raise TaxonomyStructureError(
                    node.id, "soc_code annotation is only valid on level-2 domain nodes"
                )

    paths: dict[tuple[str, ...], TaxonomyPath] = {}
    children_by_label: dict[str, dict[str, TaxonomyNode]] = {}

    def walk(node: TaxonomyNode, ids: tuple[str, ...], labels: tuple[str, ...]) -> None:
        children_by_label[node.id] = {canonical_label(c.label): c for c in node.children}
        if node.is_leaf and node.level > 0:
            path = TaxonomyPath(taxonomy_kind=kind, node_ids=ids, labels=labels)
            key = tuple(canonical_label(x) for x in labels)
            if key in paths:
                raise TaxonomyStructureError(
                    node.id, f"path label sequence {labels!r} is not unique"
                )
            paths[key] = path
            return
        for child in node.children:
            walk(child, ids + (child.id,), labels + (child.label,))

    walk(root, (), ())

    return Taxonomy(
        kind=kind,
        root=root,
        path_index=frozenset(paths.values()),
        _nodes_by_id=nodes_by_id,
        _paths_by_labels=paths,
        _children_by_label=children_by_label,
    )


def all_paths(t: Taxonomy) -> frozenset[TaxonomyPath]:
    """Every root-to-leaf path, exactly once; cardinality equals leaf count."""
    return t.path_index


def resolve_path(t: Taxonomy, labels: Sequence[str]) -> TaxonomyPath:
    """Resolve a label sequence to the unique root-to-leaf path it names.

    Matching is canonical (case-insensitive, whitespace-normalized) and must
    cover the full path from a root child down to a leaf.

    Raises
    ------
    PartialPathError
        If the labels are a valid prefix ending at a non-leaf node.
    UnknownPathError
        If any label is absent or mis-ordered.
    """
    key = tuple(canonical_label(x) for x in labels)
    found = t._paths_by_labels.get(key)
    if found is not None:
        return found
    if not labels:
        raise UnknownPathError("empty label sequence")
    # Distinguish a valid non-leaf prefix from a genuine mismatch.
    node = t.root
    for label in key:
        child = t._children_by_label[node.id].get(label)
        if child is None:
            raise UnknownPathError(f"no path matches labels {list(labels)!r}")
        node = child
    if not node.is_leaf:
        raise PartialPathError(
            f"labels {list(labels)!r} stop at non-leaf {node.label!r} (level {node.level})"
        )
    raise UnknownPathError(f"no path matches labels {list(labels)!r}")


def flatten_for_prompt(t: Taxonomy) -> str:
    """Deterministic indented rendering suitable for annotator prompts.

    One line per node in document order; every leaf appears exactly once.
    Identical taxonomies flatten to byte-identical text.
    """
    lines = [f"{t.kind.value} taxonomy:"]

    def emit(node: TaxonomyNode) -> None:
        lines.append("  " * node.level + "- " + node.label)
        for child in node.children:
            emit(child)

    for child in t.root.children:
        emit(child)
    return "\n".join(lines) + "\n"
