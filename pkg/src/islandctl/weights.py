"""Weighted-graph construction and pairwise constraint application.

Edge weights combine per-line power-flow disruption with inverse electrical
distance; must-link pairs get a large finite surrogate for an infinite weight
and cannot-link pairs are zeroed. Graphs are immutable: constraint application
returns a new graph and keeps the pristine weights for cut reporting and for a
stable big-M base.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError, ZeroDegreeError
from .impedance import ImpedanceMatrix, electrical_distance
from .model import Branch, BusIndex, Network, Snapshot

log = logging.getLogger("islandctl.weights")

Pair = tuple[int, int]  # canonical (low, high) bus-id pair


def edge_disruption(p_ij: float, p_ji: float) -> float:
    """Mean absolute directed active power on a line: (|p_ij| + |p_ji|) / 2."""
    return 0.5 * (abs(p_ij) + abs(p_ji))


@dataclass(frozen=True)
class Edge:
    """One aggregated graph edge (all parallel circuits of a bus pair)."""

    weight: float
    branches: tuple[Branch, ...] = ()  # empty for virtual (constraint-created) edges
    constrained: str | None = None  # None | "must-link" | "cannot-link" | "vsc"

    @property
    def virtual(self) -> bool:
        return not self.branches


@dataclass(frozen=True)
class WeightedGraph:
    """Symmetric nonnegative edge weights over the network's buses.

    ``edges`` holds current weights keyed by canonical bus pair; ``pristine``
    freezes the pre-constraint weights (the big-M base and the cut-reporting
    weights). ``generator_buses`` and ``vsc_pairs`` are carried from the network
    so downstream passes stay self-contained.
    """

    index: BusIndex
    edges: dict[Pair, Edge]
    pristine: dict[Pair, float]
    generator_buses: frozenset[int] = frozenset()
    vsc_pairs: frozenset[Pair] = frozenset()

    def __post_init__(self):
        for pair, edge in self.edges.items():
            if pair[0] >= pair[1]:
                raise ValidationError(f"edge pair {pair} not in canonical order")
            if edge.weight < 0 or not np.isfinite(edge.weight):
                raise ValidationError(f"edge {pair} has invalid weight {edge.weight}")

    @property
    def n(self) -> int:
        return len(self.index)

    def weight(self, i: int, j: int) -> float:
        """Current weight between bus ids i and j (0 when no edge)."""
        pair = (i, j) if i < j else (j, i)
        edge = self.edges.get(pair)
        return edge.weight if edge is not None else 0.0

    def to_dense(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for (a, b), edge in self.edges.items():
            i = self.index.index_of(a)
            j = self.index.index_of(b)
            w[i, j] = edge.weight
            w[j, i] = edge.weight
        return w

    def physical_adjacency(self) -> dict[int, set[int]]:
        """Bus-id adjacency over physical (branch-backed) edges only."""
        adj: dict[int, set[int]] = {b: set() for b in self.index.ids}
        for (a, b), edge in self.edges.items():
            if edge.branches:
                adj[a].add(b)
                adj[b].add(a)
        return adj

    def connected(self) -> bool:
        """Connectivity of the positive-weight graph."""
        adj: dict[int, set[int]] = {b: set() for b in self.index.ids}
        for (a, b), edge in self.edges.items():
            if edge.weight > 0:
                adj[a].add(b)
                adj[b].add(a)
        seen = {self.index.ids[0]}
        stack = [self.index.ids[0]]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n


@dataclass(frozen=True)
class DegreeMatrix:
    """Diagonal of row sums of W."""

    a: np.ndarray

    def volume(self, indices) -> float:
        return float(self.a[list(indices)].sum())


@dataclass(frozen=True)
class ConstraintSet:
    """Must-link generator groups and cannot-link VSC terminal pairs."""

    coherent_groups: tuple[frozenset[int], ...] = ()
    vsc_pairs: tuple[Pair, ...] = ()
    big_m_factor: float = 1e4

    def __post_init__(self):
        if self.big_m_factor <= 0:
            raise ValidationError("big_m_factor must be positive")
        seen: set[int] = set()
        for grp in self.coherent_groups:
            overlap = seen & grp
            if overlap:
                raise ValidationError(f"coherent groups overlap on buses {sorted(overlap)}")
            seen |= grp

    def validate_against(self, network: Network) -> None:
        hosts = network.generator_buses | {b for p in network.vsc_pairs for b in p}
        for grp in self.coherent_groups:
            for bus in grp:
                if bus not in hosts:
                    raise ValidationError(
                        f"constraint bus {bus} hosts neither a generator nor a VSC terminal"
                    )
        for a, b in self.vsc_pairs:
            for bus in (a, b):
                if bus not in hosts:
                    raise ValidationError(
                        f"constraint bus {bus} hosts neither a generator nor a VSC terminal"
                    )

    @property
    def group_count(self) -> int:
        return len(self.coherent_groups)


def build_weighted_graph(
    network: Network,
    snapshot: Snapshot,
    zbus: ImpedanceMatrix | None,
    dc_distance: float | None = None,
) -> WeightedGraph:
    """Assemble W: per bus pair, summed circuit disruptions over electrical distance.

    DC-link circuits use ``dc_distance`` (default: the branch's own |r + jx|)
    instead of the Z-bus distance. Snapshot weight overrides replace the computed
    value for their edges, which also waives the flow requirement there. ``zbus``
    may be None only if overrides cover every AC edge.
    """
    edges: dict[Pair, Edge] = {}
    for pair, branches in network.branches_by_pair().items():
        if pair in snapshot.weight_overrides:
            w = snapshot.weight_overrides[pair]
            if w < 0:
                raise ValidationError(f"weight override for edge {pair} is negative")
            edges[pair] = Edge(weight=w, branches=branches)
            continue
        w = 0.0
        for br in branches:
            flow = snapshot.flow_for(br)
            if flow is None:
                raise ValidationError(f"snapshot has no flow for branch {br.key}")
            disruption = edge_disruption(*flow)
            if br.kind == "vsc-dc-link":
                dist = dc_distance if dc_distance is not None else abs(br.impedance)
                if dist <= 0:
                    raise ValidationError(f"dc branch {br.key}: nonpositive distance {dist}")
            else:
                if zbus is None:
                    raise ValidationError(
                        f"edge {pair} needs an impedance matrix (no weight override given)"
                    )
                dist = electrical_distance(zbus, pair[0], pair[1])
            w += disruption / dist
        edges[pair] = Edge(weight=w, branches=branches)
    return WeightedGraph(
        index=network.bus_index,
        edges=edges,
        pristine={p: e.weight for p, e in edges.items()},
        generator_buses=network.generator_buses,
        vsc_pairs=network.vsc_pairs,
    )


def degree_matrix(g: WeightedGraph) -> DegreeMatrix:
    """Row sums of W, accumulated in ascending neighbor order so recomputation
    is exact; a zero-degree bus is an error."""
    incident: dict[int, list[tuple[int, float]]] = {i: [] for i in range(g.n)}
    for (bi, bj), edge in g.edges.items():
        i = g.index.index_of(bi)
        j = g.index.index_of(bj)
        incident[i].append((j, edge.weight))
        incident[j].append((i, edge.weight))
    a = np.zeros(g.n)
    for i, nbrs in incident.items():
        total = 0.0
        for _, w in sorted(nbrs):
            total += w
        a[i] = total
    zero = np.flatnonzero(a == 0.0)
    if zero.size:
        bus = g.index.id_of(int(zero[0]))
        raise ZeroDegreeError(f"bus {bus} has zero degree (no positive edge weight)")
    return DegreeMatrix(a=a)


def big_m_weight(g: WeightedGraph, c: ConstraintSet) -> float:
    """Finite stand-in for an infinite must-link weight, from pristine weights."""
    base = max(g.pristine.values(), default=0.0)
    return c.big_m_factor * base


def apply_coherence_constraints(g: WeightedGraph, c: ConstraintSet) -> WeightedGraph:
    """Force same-group generator pairs together (weight M, virtual edge if
    needed) and cross-group pairs apart (weight 0). Idempotent; order-independent
    with the VSC step."""
    if not c.coherent_groups:
        return g
    for grp in c.coherent_groups:
        for bus in grp:
            g.index.index_of(bus)  # raises on unknown bus
    m = big_m_weight(g, c)
    edges = dict(g.edges)
    groups = [sorted(grp) for grp in c.coherent_groups]
    for grp in groups:
        for ai, a in enumerate(grp):
            for b in grp[ai + 1:]:
                pair = (a, b) if a < b else (b, a)
                old = edges.get(pair)
                edges[pair] = Edge(
                    weight=m,
                    branches=old.branches if old else (),
                    constrained="must-link",
                )
    for gi, ga in enumerate(groups):
        for gb in groups[gi + 1:]:
            for a in ga:
                for b in gb:
                    pair = (a, b) if a < b else (b, a)
                    old = edges.get(pair)
                    if old is None:
                        continue  # no physical edge: already zero
                    if old.branches and old.weight > 0:
                        log.warning(
                            "cannot-link zeroes physically connected generator pair %s "
                            "(line weight %.4f suppressed)", pair, old.weight,
                        )
                    edges[pair] = replace(old, weight=0.0, constrained="cannot-link")
    return replace(g, edges=edges)


def apply_vsc_constraints(g: WeightedGraph, c: ConstraintSet) -> WeightedGraph:
    """Zero the weight between each VSC terminal pair. Idempotent."""
    if not c.vsc_pairs:
        return g
    edges = dict(g.edges)
    for a, b in c.vsc_pairs:
        pair = (a, b) if a < b else (b, a)
        if pair not in g.vsc_pairs:
            raise ValidationError(f"pair {pair} does not correspond to any VSC link")
        old = edges.get(pair)
        if old is None:
            continue  # link without a DC branch carries no edge; already zero
        edges[pair] = replace(old, weight=0.0, constrained="vsc")
    return replace(g, edges=edges)
