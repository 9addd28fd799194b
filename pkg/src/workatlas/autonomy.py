"""Task complexity, success-rate curves, autonomy levels, and the advisor.

A workflow is a tree of goal-directed steps with a binary success status on
every node; the leaves are the most granular steps. A node's complexity is
its leaf-descendant count (taken reflexively, so a leaf is a one-step task
of complexity 1). Pooling all nodes of a group by complexity level gives
the group's success-rate curve, and the autonomy level is the highest
sufficiently-sampled level whose success rate clears the threshold.

The advisor consults the curves matched to a task's domains/skills and
recommends end-to-end delegation, decomposition into simpler subtasks, or
reports that the data cannot support either call.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterator, Mapping, Sequence

from .annotate import Annotator
from .mapping import TaskExample

UNATTRIBUTED = "unattributed"

#: One-sided 95% normal quantile, used for the lower-confidence-bound mode.
_Z_ONE_SIDED_95 = 1.6448536269514722


@dataclass
class WorkflowNode:
    """One hierarchical workflow step; roots carry trajectory metadata."""

    id: str
    description: str
    status: int  # 0 failure, 1 success
    children: tuple["WorkflowNode", ...] = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (0, 1):
            raise ValueError(f"node {self.id!r}: status must be 0 or 1, got {self.status!r}")

    @property
    def is_leaf(self) -> bool:
        return not self.children


def iter_nodes(root: WorkflowNode) -> Iterator[WorkflowNode]:
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(n.children))


def workflow_from_document(doc: Mapping) -> WorkflowNode:
    """Build a workflow tree from a trajectory document.

    The document has ``{benchmark, agent, model, trajectory_id, root}``;
    tree metadata lands on the root node. Node ids must be unique within
    the trajectory.
    """
    meta = {
        k: doc[k] for k in ("benchmark", "agent", "model", "trajectory_id") if k in doc
    }

    def build(node_doc: Mapping, where: str) -> WorkflowNode:
        for key in ("id", "description", "status"):
            if key not in node_doc:
                raise ValueError(f"{where}: workflow node missing {key!r}")
        children = tuple(
            build(c, f"{where}.children[{i}]")
            for i, c in enumerate(node_doc.get("children", []))
        )
        return WorkflowNode(
            id=str(node_doc["id"]),
            description=node_doc["description"],
            status=node_doc["status"],
            children=children,
        )

    if "root" not in doc:
        raise ValueError("workflow document missing 'root'")
    root = build(doc["root"], "root")
    root.metadata = meta
    seen: set[str] = set()
    for node in iter_nodes(root):
        if node.id in seen:
            raise ValueError(f"workflow node id {node.id!r} is not unique")
        seen.add(node.id)
    return root


def complexity(root: WorkflowNode) -> dict[str, int]:
    """Leaf-descendant count per node id.

    Leaves have complexity 1 (the node itself is the one granular step);
    an internal node's complexity is the sum over its children, which is
    exactly its total leaf count.
    """
    if root is None:
        raise ValueError("empty workflow tree")
    out: dict[str, int] = {}
    stack: list[tuple[WorkflowNode, bool]] = [(root, False)]
    while stack:
        node, children_done = stack.pop()
        if node.is_leaf:
            out[node.id] = 1
        elif children_done:
            out[node.id] = sum(out[c.id] for c in node.children)
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return out


@dataclass(frozen=True)
class LevelStats:
    successes: int
    totals: int

    @property
    def sr(self) -> float:
        return self.successes / self.totals

    @property
    def lcb(self) -> float:
        """One-sided 95% Wilson lower bound on the success rate."""
        n, z = self.totals, _Z_ONE_SIDED_95
        p = self.sr
        denom = 1 + z * z / n
        center = p + z * z / (2 * n)
        spread = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
        return max(0.0, (center - spread) / denom)


@dataclass(frozen=True)
class AutonomyCurve:
    """Per-complexity-level success statistics for one group."""

    group_key: str
    levels: dict[int, LevelStats]
    threshold: float | None = None
    autonomy: int | None = None
    non_monotonic_levels: tuple[int, ...] = ()

    @property
    def total_nodes(self) -> int:
        return sum(s.totals for s in self.levels.values())


GroupFn = Callable[[WorkflowNode], Sequence[str]]


def _metadata_grouper(key: str) -> GroupFn:
    def group(root: WorkflowNode) -> Sequence[str]:
        value = root.metadata.get(key)
        return [str(value)] if value not in (None, "") else [UNATTRIBUTED]

    return group


def success_rates(
    workflows: Sequence[WorkflowNode],
    grouping: str | GroupFn = "overall",
    node_group_fn: GroupFn | None = None,
) -> dict[str, AutonomyCurve]:
    """Build success-rate curves, pooling all nodes of each group by level.

    ``grouping`` may be ``"overall"``, a root metadata field (``benchmark``,
    ``agent``, ``model``), or a callable returning the group keys a workflow
    belongs to (e.g. the domains of its source task); a workflow in several
    groups contributes its nodes to each. Workflows whose group cannot be
    resolved pool under ``"unattributed"`` rather than being dropped.
    ``node_group_fn`` switches attribution to per-node granularity.
    """
    if callable(grouping):
        group_fn = grouping
    elif grouping == "overall":
        group_fn = lambda root: ["overall"]  # noqa: E731
    else:
        group_fn = _metadata_grouper(grouping)

    acc: dict[str, dict[int, list[int]]] = {}
    for root in workflows:
        levels = complexity(root)
        root_groups = list(group_fn(root)) or [UNATTRIBUTED]
        for node in iter_nodes(root):
            groups = root_groups
            if node_group_fn is not None:
                groups = list(node_group_fn(node)) or [UNATTRIBUTED]
            k = levels[node.id]
            for g in groups:
                bucket = acc.setdefault(g, {}).setdefault(k, [0, 0])
                bucket[0] += node.status
                bucket[1] += 1
    return {
        g: AutonomyCurve(
            group_key=g,
            levels={
                k: LevelStats(successes=v[0], totals=v[1])
                for k, v in sorted(by_level.items())
            },
        )
        for g, by_level in sorted(acc.items())
    }


def autonomy_level(
    curve: AutonomyCurve,
    threshold: float,
    min_samples: int = 10,
    confidence_mode: str = "raw",
) -> AutonomyCurve:
    """Assess a curve: the autonomy level is the literal maximum complexity
    whose success rate meets the threshold with enough samples.

    Levels below the returned one that fail the threshold are flagged as
    non-monotonic rather than hidden. ``confidence_mode="lcb"`` applies the
    threshold to the one-sided 95% lower confidence bound instead of the
    raw rate. Returns a copy of the curve with the assessment filled in.
    """
    if not (0 < threshold <= 1):
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if min_samples < 1:
        raise ValueError(f"min_samples must be >= 1, got {min_samples}")
    if confidence_mode not in ("raw", "lcb"):
        raise ValueError(f"confidence_mode must be 'raw' or 'lcb', got {confidence_mode!r}")

    def metric(stats: LevelStats) -> float:
        return stats.lcb if confidence_mode == "lcb" else stats.sr

    eligible = {k: s for k, s in curve.levels.items() if s.totals >= min_samples}
    passing = [k for k, s in eligible.items() if metric(s) >= threshold]
    level = max(passing) if passing else None
    flags = (
        tuple(sorted(k for k, s in eligible.items() if k < level and metric(s) < threshold))
        if level is not None
        else ()
    )
    return replace(curve, threshold=threshold, autonomy=level, non_monotonic_levels=flags)


@dataclass(frozen=True)
class OrderingJudgment:
    shallower_description: str
    deeper_description: str
    affirmed: bool  # judge agreed the deeper task is more complex
    judge_id: str


@dataclass(frozen=True)
class OrderingValidation:
    fraction_affirmed: float
    judgments: tuple[OrderingJudgment, ...]


_COMPARE_PROMPT = (
    "Two task descriptions follow. Judge which one involves the more complex "
    "procedure, i.e. the larger number of steps someone would plan for.\n"
    "\n"
    "Task A: {a}\n"
    "Task B: {b}\n"
    "\n"
    "Answer with exactly one letter: A or B."
)


def validate_ordering(
    workflows: Sequence[WorkflowNode],
    pair_count: int,
    judge: Annotator,
    rng_seed: int | None = None,
) -> OrderingValidation:
    """Check that deeper workflow steps read as more complex tasks.

    Samples ``pair_count`` description pairs from adjacent complexity levels
    and asks the judge which is more complex; the presentation order is
    randomized per pair so position bias cancels. Returns the fraction of
    pairs where the deeper task was judged more complex. An unparseable
    judge answer counts as a non-affirmation.
    """
    by_level: dict[int, list[str]] = {}
    for root in workflows:
        levels = complexity(root)
        for node in iter_nodes(root):
            by_level.setdefault(levels[node.id], []).append(node.description)
    adjacent = [
        (k, k + 1) for k in sorted(by_level) if k + 1 in by_level and by_level[k]
    ]
    if not adjacent:
        raise ValueError("corpus has no adjacent-level node pairs")

    rng = random.Random(rng_seed)
    judgments: list[OrderingJudgment] = []
    for _ in range(pair_count):
        k, k_next = adjacent[rng.randrange(len(adjacent))]
        shallow = by_level[k][rng.randrange(len(by_level[k]))]
        deep = by_level[k_next][rng.randrange(len(by_level[k_next]))]
        deep_is_a = rng.random() < 0.5
        a, b = (deep, shallow) if deep_is_a else (shallow, deep)
        raw = judge.annotate(_COMPARE_PROMPT.format(a=a, b=b), "")
        answer = raw.strip().split()[0].rstrip(".,:;").upper() if raw.strip() else ""
        affirmed = answer == ("A" if deep_is_a else "B")
        judgments.append(
            OrderingJudgment(
                shallower_description=shallow,
                deeper_description=deep,
                affirmed=affirmed,
                judge_id=judge.annotator_id,
            )
        )
    fraction = sum(1 for j in judgments if j.affirmed) / len(judgments)
    return OrderingValidation(fraction_affirmed=fraction, judgments=tuple(judgments))


class AdviceDecision(str, Enum):
    DELEGATE_END_TO_END = "delegate_end_to_end"
    DECOMPOSE = "decompose"
    INSUFFICIENT_DATA = "insufficient_data"


@dataclass(frozen=True)
class ConsultedValue:
    group_key: str
    level: int
    sr: float | None
    totals: int
    passed: bool


@dataclass(frozen=True)
class AutonomyAdvice:
    benchmark: str
    example_id: str
    matched_groups: tuple[str, ...]
    estimated_complexity: int
    threshold: float
    decision: AdviceDecision
    consulted: tuple[ConsultedValue, ...]


def advise(
    task: TaskExample,
    threshold: float,
    curves: Mapping[str, AutonomyCurve],
    matcher: Callable[[TaskExample], Sequence[str]],
    complexity_estimate: int,
    min_samples: int = 10,
    confidence_mode: str = "raw",
) -> AutonomyAdvice:
    """Recommend an autonomy level for one task.

    The task is matched to groups (via ``matcher``, typically a taxonomy
    mapping); delegation end-to-end is recommended only when every matched
    curve clears the threshold at the estimated complexity with enough
    samples. Otherwise, if any matched curve clears the threshold at some
    lower complexity, decomposing into simpler subtasks is recommended;
    failing that, the data is insufficient. The complexity estimate is
    supplied by the caller; nothing is invented here.
    """
    if complexity_estimate < 1:
        raise ValueError(f"complexity_estimate must be >= 1, got {complexity_estimate}")
    matched = [g for g in matcher(task) if g in curves]
    if not matched:
        raise ValueError(f"no curves match task {task.key}; cannot advise")

    def metric(stats: LevelStats) -> float:
        return stats.lcb if confidence_mode == "lcb" else stats.sr

    consulted: list[ConsultedValue] = []
    all_pass = True
    for g in matched:
        stats = curves[g].levels.get(complexity_estimate)
        passed = (
            stats is not None
            and stats.totals >= min_samples
            and metric(stats) >= threshold
        )
        consulted.append(
            ConsultedValue(
                group_key=g,
                level=complexity_estimate,
                sr=stats.sr if stats else None,
                totals=stats.totals if stats else 0,
                passed=passed,
            )
        )
        all_pass = all_pass and passed

    if all_pass:
        decision = AdviceDecision.DELEGATE_END_TO_END
    else:
        can_decompose = False
        for g in matched:
            for k, stats in curves[g].levels.items():
                if (
                    k < complexity_estimate
                    and stats.totals >= min_samples
                    and metric(stats) >= threshold
                ):
                    can_decompose = True
                    consulted.append(
                        ConsultedValue(
                            group_key=g, level=k, sr=stats.sr, totals=stats.totals, passed=True
                        )
                    )
                    break
            if can_decompose:
                break
        decision = (
            AdviceDecision.DECOMPOSE if can_decompose else AdviceDecision.INSUFFICIENT_DATA
        )
    return AutonomyAdvice(
        benchmark=task.benchmark,
        example_id=task.example_id,
        matched_groups=tuple(matched),
        estimated_complexity=complexity_estimate,
        threshold=threshold,
        decision=decision,
        consulted=tuple(consulted),
    )
