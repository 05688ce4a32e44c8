"""Knowledge graph of parent concepts and the leaf skills they contain.

Two edge relations connect parent concepts: *prerequisite* edges say which
concepts must be assessed before another may be learned, and *progression*
edges give each concept at most one next-higher concept to advance to.
Both relations are acyclic; leaves belong to exactly one parent and keep
their declaration order, which downstream modules rely on when they align
performance strings with leaves.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Mapping, Optional, Sequence

from .errors import GraphParseError, GraphValidationError, UnknownNode

__all__ = [
    "QuizItem",
    "KnowledgeGraph",
    "load_graph",
    "load_graph_file",
    "build_graph",
    "serialize_graph",
    "prerequisites_of",
    "leaves_under",
    "next_higher",
]

_TOP_LEVEL_KEYS = {"parents", "prerequisites", "progression", "aliases"}
_PARENT_KEYS = {"id", "leaves"}
_LEAF_KEYS = {"id", "quiz"}
_QUIZ_KEYS = {"prompt", "choices", "correct_index"}
_EDGE_KEYS = {"from", "to"}


@dataclass(frozen=True)
class QuizItem:
    """One multiple-choice item; ``correct_index`` points into ``choices``."""

    prompt: str
    choices: tuple[str, ...]
    correct_index: int


@dataclass(frozen=True)
class KnowledgeGraph:
    parents: tuple[str, ...]
    leaves_by_parent: Mapping[str, tuple[str, ...]]
    prerequisites: tuple[tuple[str, str], ...]
    progression: tuple[tuple[str, str], ...]
    quizzes: Mapping[str, tuple[QuizItem, ...]] = field(default_factory=dict)
    aliases: Mapping[str, str] = field(default_factory=dict)

    @property
    def leaves(self) -> tuple[str, ...]:
        return tuple(leaf for p in self.parents for leaf in self.leaves_by_parent[p])

    @property
    def containment(self) -> dict[str, str]:
        """Map of leaf id to its owning parent."""
        return {
            leaf: parent
            for parent in self.parents
            for leaf in self.leaves_by_parent[parent]
        }

    def is_parent(self, node: str) -> bool:
        return node in self.leaves_by_parent

    def resolve(self, name: str) -> str:
        """Resolve a node id or registered alias to a node id."""
        if name in self.leaves_by_parent or name in self.containment:
            return name
        if name in self.aliases:
            return self.aliases[name]
        raise UnknownNode(f"unknown node or alias: {name!r}")


def load_graph(document: str) -> KnowledgeGraph:
    """Parse and validate a graph document (JSON text)."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise GraphParseError(f"invalid JSON: {exc}") from None
    return build_graph(doc)


def load_graph_file(path) -> KnowledgeGraph:
    with open(path, encoding="utf-8") as handle:
        return load_graph(handle.read())


def _require_keys(obj: dict, allowed: set, where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise GraphParseError(f"unknown key(s) {sorted(unknown)} in {where}")


def _node_id(value, where: str) -> str:
    if not isinstance(value, str) or not value or any(c.isspace() for c in value):
        raise GraphValidationError(
            f"{where}: node ids must be non-empty strings without whitespace, got {value!r}"
        )
    return value


def _edge_list(raw, where: str) -> list[tuple[str, str]]:
    if not isinstance(raw, list):
        raise GraphParseError(f"{where} must be an array of edges")
    edges = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise GraphParseError(f"{where} entries must be objects")
        _require_keys(entry, _EDGE_KEYS, where)
        if "from" not in entry or "to" not in entry:
            raise GraphParseError(f"{where} entries need 'from' and 'to'")
        edges.append((_node_id(entry["from"], where), _node_id(entry["to"], where)))
    return edges


def _quiz_items(raw, leaf: str) -> tuple[QuizItem, ...]:
    if not isinstance(raw, list):
        raise GraphParseError(f"quiz for {leaf!r} must be an array")
    items = []
    for item in raw:
        if not isinstance(item, dict):
            raise GraphParseError(f"quiz item for {leaf!r} must be an object")
        _require_keys(item, _QUIZ_KEYS, f"quiz item of {leaf!r}")
        try:
            prompt = item["prompt"]
            choices = item["choices"]
            correct = item["correct_index"]
        except KeyError as exc:
            raise GraphParseError(f"quiz item of {leaf!r} missing {exc}") from None
        if not isinstance(prompt, str) or not prompt:
            raise GraphValidationError(f"quiz prompt of {leaf!r} must be non-empty")
        if (
            not isinstance(choices, list)
            or len(choices) < 2
            or not all(isinstance(c, str) and c for c in choices)
        ):
            raise GraphValidationError(
                f"quiz item of {leaf!r} needs at least two non-empty choices"
            )
        if not isinstance(correct, int) or isinstance(correct, bool) or not (
            0 <= correct < len(choices)
        ):
            raise GraphValidationError(
                f"quiz item of {leaf!r}: correct_index out of range"
            )
        items.append(QuizItem(prompt, tuple(choices), correct))
    return tuple(items)


def _check_acyclic(nodes: Sequence[str], edges: Sequence[tuple[str, str]], what: str) -> None:
    out: dict[str, list[str]] = {n: [] for n in nodes}
    indeg = {n: 0 for n in nodes}
    for a, b in edges:
        out[a].append(b)
        indeg[b] += 1
    ready = deque(n for n in nodes if indeg[n] == 0)
    seen = 0
    while ready:
        seen += 1
        for succ in out[ready.popleft()]:
            indeg[succ] -= 1
            if indeg[succ] == 0:
                ready.append(succ)
    if seen != len(nodes):
        raise GraphValidationError(f"{what} edges contain a cycle")


def build_graph(doc) -> KnowledgeGraph:
    """Validate a decoded graph document and build the graph."""
    if not isinstance(doc, dict):
        raise GraphParseError("graph document must be a JSON object")
    _require_keys(doc, _TOP_LEVEL_KEYS, "graph document")
    if "parents" not in doc:
        raise GraphParseError("graph document needs a 'parents' array")
    raw_parents = doc["parents"]
    if not isinstance(raw_parents, list) or not raw_parents:
        raise GraphValidationError("'parents' must be a non-empty array")

    parents: list[str] = []
    leaves_by_parent: dict[str, tuple[str, ...]] = {}
    quizzes: dict[str, tuple[QuizItem, ...]] = {}
    seen_ids: set[str] = set()

    for entry in raw_parents:
        if not isinstance(entry, dict):
            raise GraphParseError("parent entries must be objects")
        _require_keys(entry, _PARENT_KEYS, "parent entry")
        pid = _node_id(entry.get("id"), "parent")
        if pid in seen_ids:
            raise GraphValidationError(f"duplicate node id {pid!r}")
        seen_ids.add(pid)
        raw_leaves = entry.get("leaves")
        if not isinstance(raw_leaves, list) or not raw_leaves:
            raise GraphValidationError(f"parent {pid!r} must contain at least one leaf")
        leaf_ids = []
        for leaf_entry in raw_leaves:
            if not isinstance(leaf_entry, dict):
                raise GraphParseError(f"leaf entries of {pid!r} must be objects")
            _require_keys(leaf_entry, _LEAF_KEYS, f"leaf entry of {pid!r}")
            lid = _node_id(leaf_entry.get("id"), f"leaf of {pid!r}")
            if lid in seen_ids:
                raise GraphValidationError(f"duplicate node id {lid!r}")
            seen_ids.add(lid)
            leaf_ids.append(lid)
            if "quiz" in leaf_entry:
                quizzes[lid] = _quiz_items(leaf_entry["quiz"], lid)
        parents.append(pid)
        leaves_by_parent[pid] = tuple(leaf_ids)

    prerequisites = _edge_list(doc.get("prerequisites", []), "prerequisites")
    progression = _edge_list(doc.get("progression", []), "progression")

    parent_set = set(parents)
    for a, b in prerequisites + progression:
        for endpoint in (a, b):
            if endpoint not in parent_set:
                raise GraphValidationError(
                    f"edge endpoint {endpoint!r} is not a parent concept"
                )
        if a == b:
            raise GraphValidationError(f"self edge on {a!r}")
    if len(set(prerequisites)) != len(prerequisites):
        raise GraphValidationError("duplicate prerequisite edge")
    if len(set(progression)) != len(progression):
        raise GraphValidationError("duplicate progression edge")
    sources = [a for a, _ in progression]
    if len(set(sources)) != len(sources):
        raise GraphValidationError("a concept may have at most one next-higher concept")
    _check_acyclic(parents, prerequisites, "prerequisite")
    _check_acyclic(parents, progression, "progression")

    aliases: dict[str, str] = {}
    raw_aliases = doc.get("aliases", {})
    if not isinstance(raw_aliases, dict):
        raise GraphParseError("'aliases' must be an object")
    all_leaf_ids = {l for ls in leaves_by_parent.values() for l in ls}
    for alias, target in raw_aliases.items():
        _node_id(alias, "alias")
        if alias in seen_ids:
            raise GraphValidationError(f"alias {alias!r} collides with a node id")
        if target not in all_leaf_ids:
            raise GraphValidationError(f"alias {alias!r} points at unknown leaf {target!r}")
        aliases[alias] = target

    return KnowledgeGraph(
        parents=tuple(parents),
        leaves_by_parent=leaves_by_parent,
        prerequisites=tuple(prerequisites),
        progression=tuple(progression),
        quizzes=quizzes,
        aliases=aliases,
    )


def serialize_graph(g: KnowledgeGraph) -> dict:
    """Inverse of build_graph: a plain document that round-trips."""
    doc: dict = {
        "parents": [
            {
                "id": p,
                "leaves": [
                    (
                        {
                            "id": leaf,
                            "quiz": [
                                {
                                    "prompt": item.prompt,
                                    "choices": list(item.choices),
                                    "correct_index": item.correct_index,
                                }
                                for item in g.quizzes[leaf]
                            ],
                        }
                        if leaf in g.quizzes
                        else {"id": leaf}
                    )
                    for leaf in g.leaves_by_parent[p]
                ],
            }
            for p in g.parents
        ],
        "prerequisites": [{"from": a, "to": b} for a, b in g.prerequisites],
        "progression": [{"from": a, "to": b} for a, b in g.progression],
    }
    if g.aliases:
        doc["aliases"] = dict(g.aliases)
    return doc


def _require_parent(g: KnowledgeGraph, node: str) -> None:
    if not g.is_parent(node):
        raise UnknownNode(f"not a parent concept: {node!r}")


def prerequisites_of(g: KnowledgeGraph, desired: str) -> list[str]:
    """All concepts that must be assessed before ``desired``.

    Returns the transitive closure over prerequisite edges, in topological
    order (prerequisites before dependents), ties broken lexicographically.
    """
    _require_parent(g, desired)
    incoming: dict[str, list[str]] = {p: [] for p in g.parents}
    for a, b in g.prerequisites:
        incoming[b].append(a)

    closure: set[str] = set()
    frontier = deque([desired])
    while frontier:
        for pre in incoming[frontier.popleft()]:
            if pre not in closure:
                closure.add(pre)
                frontier.append(pre)

    # Kahn over the closure-induced subgraph; heap gives lexicographic ties.
    indeg = {n: 0 for n in closure}
    out: dict[str, list[str]] = {n: [] for n in closure}
    for a, b in g.prerequisites:
        if a in closure and b in closure:
            out[a].append(b)
            indeg[b] += 1
    heap: list[str] = []
    for n in closure:
        if indeg[n] == 0:
            heappush(heap, n)
    ordered = []
    while heap:
        node = heappop(heap)
        ordered.append(node)
        for succ in out[node]:
            indeg[succ] -= 1
            if indeg[succ] == 0:
                heappush(heap, succ)
    return ordered


def leaves_under(g: KnowledgeGraph, parent: str) -> list[str]:
    """Leaves of ``parent`` in declaration order."""
    _require_parent(g, parent)
    return list(g.leaves_by_parent[parent])


def next_higher(g: KnowledgeGraph, parent: str) -> Optional[str]:
    """The progression successor of ``parent``, or None at the end."""
    _require_parent(g, parent)
    for a, b in g.progression:
        if a == parent:
            return b
    return None
