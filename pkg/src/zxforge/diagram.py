"""Core data model for ZX/ZH diagrams.

A diagram is an undirected port multigraph.  Nodes are spiders (with a
color and an integer phase in degrees), H-boxes (with a phase, fixed to
180 in pure-ZX diagrams) and boundary terminals.  Wires are an unordered
multiset of endpoint pairs; parallel wires and self-loops are
representable.  Only connectivity matters: endpoints carry no order.

Diagrams are immutable values.  Construction validates, `normalize`
removes self-loops (folding Hadamard self-loops into the spider phase),
and all other operations are pure functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class DiagramError(ValueError):
    """Raised for structurally invalid diagrams or bad diagram files."""


def _check_phase(phase: int) -> int:
    if not isinstance(phase, int) or isinstance(phase, bool):
        raise DiagramError(f"phase must be an integer, got {phase!r}")
    return phase % 360


@dataclass(frozen=True)
class Spider:
    """A Z (color **+1**, green) or X (color **-1**, red) spider."""

    color: int
    phase: int

    def __post_init__(self) -> None:
        if self.color not in (1, -1):
            raise DiagramError(f"spider color must be +1 or -1, got {self.color!r}")
        object.__setattr__(self, "phase", _check_phase(self.phase))


@dataclass(frozen=True)
class HBox:
    """An H-box; at arity 2 and phase 180 this is the Hadamard gate."""

    phase: int = 180

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", _check_phase(self.phase))


@dataclass(frozen=True)
class Boundary:
    """A named terminal; always degree 1."""

    name: str


Node = Spider | HBox | Boundary

# Convenience constructors used heavily in tests and builders.
def Z(phase: int = 0) -> Spider:
    return Spider(1, phase)


def X(phase: int = 0) -> Spider:
    return Spider(-1, phase)


@dataclass(frozen=True)
class Diagram:
    """An immutable attributed port multigraph.

    ``nodes`` maps node id to its :data:`Node` payload; ``wires`` is a
    tuple of ``(a, b)`` endpoint pairs with ``a <= b``.  Use
    :func:`make_diagram` to construct with validation.
    """

    nodes: Mapping[int, Node]
    wires: tuple[tuple[int, int], ...]

    @cached_property
    def degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in self.nodes}
        for a, b in self.wires:
            deg[a] += 1
            deg[b] += 1
        return deg

    @cached_property
    def adjacency(self) -> dict[int, dict[int, int]]:
        """Neighbor -> wire multiplicity per node (self-loops included, counted once)."""
        adj: dict[int, dict[int, int]] = {v: {} for v in self.nodes}
        for a, b in self.wires:
            adj[a][b] = adj[a].get(b, 0) + 1
            if a != b:
                adj[b][a] = adj[b].get(a, 0) + 1
        return adj

    @cached_property
    def incident(self) -> dict[int, list[int]]:
        """Node -> indices into ``wires`` of incident wires (self-loops listed twice)."""
        inc: dict[int, list[int]] = {v: [] for v in self.nodes}
        for i, (a, b) in enumerate(self.wires):
            inc[a].append(i)
            inc[b].append(i)
        return inc

    def boundaries(self) -> list[int]:
        return [v for v, n in self.nodes.items() if isinstance(n, Boundary)]

    def spiders(self) -> list[int]:
        return [v for v, n in self.nodes.items() if isinstance(n, Spider)]

    def hboxes(self) -> list[int]:
        return [v for v, n in self.nodes.items() if isinstance(n, HBox)]

    def quantity(self) -> int:
        """Spiders + H-boxes + wires; the decreasing measure of the simplifying rules."""
        return len(self.spiders()) + len(self.hboxes()) + len(self.wires)

    def with_ids_permuted(self, perm: Mapping[int, int]) -> "Diagram":
        """Relabel node ids by ``perm`` (a bijection on the current ids)."""
        nodes = {perm[v]: n for v, n in self.nodes.items()}
        wires = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in self.wires))
        return Diagram(nodes, wires)  # type: ignore[arg-type]


def make_diagram(
    nodes: Mapping[int, Node] | Iterable[tuple[int, Node]],
    wires: Iterable[Sequence[int]],
) -> Diagram:
    """Build and validate a diagram; does **not** normalize.

    Raises :class:`DiagramError` on duplicate ids, dangling wire
    endpoints, boundaries of degree != 1 or duplicate boundary names.
    """
    node_map: dict[int, Node] = {}
    pairs = list(nodes.items()) if isinstance(nodes, Mapping) else list(nodes)
    for vid, payload in pairs:
        if not isinstance(vid, int) or isinstance(vid, bool):
            raise DiagramError(f"node id must be an integer, got {vid!r}")
        if vid in node_map:
            raise DiagramError(f"duplicate node id {vid}")
        if not isinstance(payload, (Spider, HBox, Boundary)):
            raise DiagramError(f"unknown node payload {payload!r}")
        node_map[vid] = payload

    wire_list: list[tuple[int, int]] = []
    for w in wires:
        a, b = w
        if a not in node_map or b not in node_map:
            raise DiagramError(f"wire ({a}, {b}) references a missing node")
        wire_list.append((a, b) if a <= b else (b, a))

    d = Diagram(node_map, tuple(sorted(wire_list)))

    names = set()
    for v, payload in node_map.items():
        if isinstance(payload, Boundary):
            if d.degrees[v] != 1:
                raise DiagramError(
                    f"boundary {payload.name!r} (id {v}) has degree {d.degrees[v]}, expected 1"
                )
            if payload.name in names:
                raise DiagramError(f"duplicate boundary name {payload.name!r}")
            names.add(payload.name)
    return d


def normalize(d: Diagram) -> Diagram:
    """Remove self-loops: plain loops on spiders vanish, a loop through a
    single 2-ary HBox(180) vanishes and adds 180 to the spider's phase.

    Idempotent; preserves the tensor semantics up to a nonzero scalar.
    """
    nodes = dict(d.nodes)
    wires = list(d.wires)

    # Hadamard self-loops: a 2-ary HBox(180) with both wires to one spider.
    for h in sorted(d.hboxes()):
        payload = nodes.get(h)
        if not isinstance(payload, HBox) or payload.phase != 180:
            continue
        ends = [w for w in wires if h in w]
        if len(ends) != 2:
            continue
        others = [a if b == h else b for a, b in ends]
        if others[0] != others[1] or others[0] == h:
            continue
        s = others[0]
        sp = nodes.get(s)
        if not isinstance(sp, Spider):
            continue
        nodes[s] = Spider(sp.color, sp.phase + 180)
        del nodes[h]
        wires.remove(ends[0])
        wires.remove(ends[1])

    # Plain self-loops on spiders.
    wires = [
        w
        for w in wires
        if not (w[0] == w[1] and isinstance(nodes.get(w[0]), Spider))
    ]
    return Diagram(nodes, tuple(sorted(wires)))


# ---------------------------------------------------------------------------
# Textual diagram format


_KIND_IN = {"z": 1, "x": -1}


def diagram_to_dict(d: Diagram) -> dict:
    nodes = []
    for v in sorted(d.nodes):
        n = d.nodes[v]
        if isinstance(n, Spider):
            nodes.append({"id": v, "kind": "z" if n.color == 1 else "x", "phase": n.phase})
        elif isinstance(n, HBox):
            nodes.append({"id": v, "kind": "h", "phase": n.phase})
        else:
            nodes.append({"id": v, "kind": "boundary", "name": n.name})
    return {"nodes": nodes, "wires": [list(w) for w in d.wires]}


def diagram_from_dict(data: dict) -> Diagram:
    try:
        raw_nodes = data["nodes"]
        raw_wires = data["wires"]
    except (TypeError, KeyError) as exc:
        raise DiagramError(f"diagram object needs 'nodes' and 'wires': {exc}") from exc
    pairs: list[tuple[int, Node]] = []
    for entry in raw_nodes:
        kind = entry.get("kind")
        vid = entry.get("id")
        if kind in _KIND_IN:
            if "phase" not in entry:
                raise DiagramError(f"node {vid}: kind {kind!r} requires 'phase'")
            pairs.append((vid, Spider(_KIND_IN[kind], entry["phase"])))
        elif kind == "h":
            if "phase" not in entry:
                raise DiagramError(f"node {vid}: kind 'h' requires 'phase'")
            pairs.append((vid, HBox(entry["phase"])))
        elif kind == "boundary":
            if "name" not in entry:
                raise DiagramError(f"node {vid}: kind 'boundary' requires 'name'")
            pairs.append((vid, Boundary(entry["name"])))
        else:
            raise DiagramError(f"node {vid}: unknown kind {kind!r}")
    return make_diagram(pairs, raw_wires)


def dumps_diagram(d: Diagram) -> str:
    return json.dumps(diagram_to_dict(d), sort_keys=True, separators=(",", ":"))


def loads_diagram(text: str) -> Diagram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError(f"bad diagram file: {exc}") from exc
    return diagram_from_dict(data)
