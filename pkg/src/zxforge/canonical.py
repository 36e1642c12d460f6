"""Exact canonical form for diagram isomorphism-class deduplication.

`canonical_key` returns a byte string equal for two normalized diagrams
iff they are isomorphic as attributed port multigraphs (spider
color/phase and H-box phase are node attributes, boundary names are
distinguishing labels, wire multiplicities matter).

The algorithm is iterative attribute/degree refinement followed by an
exhaustive individualization search over the first non-singleton cell,
taking the lexicographically least signature over all branches.  This is
exact, not hash-approximate: state counts depend on it.
"""

from __future__ import annotations

import itertools

from .diagram import Boundary, Diagram, HBox, Spider


class IsoSizeError(ValueError):
    """Raised when `iso_oracle` is asked about diagrams past its size limit."""


def _node_invariant(d: Diagram, v: int) -> tuple:
    n = d.nodes[v]
    loops = d.adjacency[v].get(v, 0)
    if isinstance(n, Spider):
        attr: tuple = (0, n.color, n.phase)
    elif isinstance(n, HBox):
        attr = (1, n.phase)
    else:
        attr = (2, n.name)
    return attr + (d.degrees[v], loops)


def _refine(d: Diagram, labels: dict[int, int]) -> dict[int, int]:
    """Iterate neighborhood refinement to a fixpoint; labels stay canonical
    (derived from sorted signature values only, never from node ids)."""
    adj = d.adjacency
    while True:
        sigs = {}
        for v in d.nodes:
            nbr = sorted(
                (labels[u], mult) for u, mult in adj[v].items() if u != v
            )
            sigs[v] = (labels[v], tuple(nbr))
        order = sorted(set(sigs.values()))
        ranks = {s: i for i, s in enumerate(order)}
        new_labels = {v: ranks[sigs[v]] for v in d.nodes}
        if len(order) == len(set(labels.values())):
            # No cell split this round: partition is equitable.
            return new_labels
        labels = new_labels


def _signature(d: Diagram, position: dict[int, int]) -> tuple:
    attrs = tuple(
        _node_invariant(d, v)[:-2]
        for v in sorted(d.nodes, key=position.__getitem__)
    )
    edges = sorted(
        tuple(sorted((position[a], position[b]))) for a, b in d.wires
    )
    return (attrs, tuple(edges))


def _search(d: Diagram, labels: dict[int, int]) -> tuple:
    """Branch over the first non-singleton cell, return the least signature."""
    counts: dict[int, int] = {}
    for lab in labels.values():
        counts[lab] = counts.get(lab, 0) + 1
    split = min((lab for lab, c in counts.items() if c > 1), default=None)
    if split is None:
        position = {v: labels[v] for v in d.nodes}
        return _signature(d, position)
    best = None
    cell = sorted(v for v, lab in labels.items() if lab == split)
    for v in cell:
        branched = {
            u: (lab * 2 + (1 if u != v else 0)) for u, lab in labels.items()
        }
        sig = _search(d, _refine(d, branched))
        if best is None or sig < best:
            best = sig
    return best  # type: ignore[return-value]


def canonical_key(d: Diagram) -> bytes:
    """Byte string identifying the isomorphism class of a normalized diagram.

    Invariant under node-id renaming and wire reordering; distinct for
    non-isomorphic diagrams.
    """
    cached = d.__dict__.get("_canonical_key")
    if cached is not None:
        return cached
    if not d.nodes:
        key = b"()"
    else:
        initial = sorted({_node_invariant(d, v) for v in d.nodes})
        ranks = {inv: i for i, inv in enumerate(initial)}
        labels = {v: ranks[_node_invariant(d, v)] for v in d.nodes}
        sig = _search(d, _refine(d, labels))
        key = repr(sig).encode()
    d.__dict__["_canonical_key"] = key
    return key


def iso_oracle(d1: Diagram, d2: Diagram, max_nodes: int = 8) -> bool:
    """Exhaustive-search isomorphism test, the independent check for
    `canonical_key`.  Intended for small diagrams (<= 8 nodes)."""
    if len(d1.nodes) > max_nodes or len(d2.nodes) > max_nodes:
        raise IsoSizeError(f"iso_oracle limited to {max_nodes} nodes")
    if len(d1.nodes) != len(d2.nodes) or len(d1.wires) != len(d2.wires):
        return False

    inv1: dict[tuple, list[int]] = {}
    inv2: dict[tuple, list[int]] = {}
    for d, acc in ((d1, inv1), (d2, inv2)):
        for v in d.nodes:
            acc.setdefault(_node_invariant(d, v), []).append(v)
    if set(inv1) != set(inv2):
        return False
    if any(len(inv1[k]) != len(inv2[k]) for k in inv1):
        return False

    keys = sorted(inv1)
    groups1 = [sorted(inv1[k]) for k in keys]
    groups2 = [sorted(inv2[k]) for k in keys]

    def wire_multiset(d: Diagram) -> dict[tuple[int, int], int]:
        acc: dict[tuple[int, int], int] = {}
        for w in d.wires:
            acc[w] = acc.get(w, 0) + 1
        return acc

    target = wire_multiset(d2)

    for perms in itertools.product(*(itertools.permutations(g) for g in groups2)):
        mapping = {}
        for g1, g2 in zip(groups1, perms):
            mapping.update(zip(g1, g2))
        image: dict[tuple[int, int], int] = {}
        for a, b in d1.wires:
            key = tuple(sorted((mapping[a], mapping[b])))
            image[key] = image.get(key, 0) + 1
        if image == target:
            return True
    return False
