"""End-to-end islanding solve, cut extraction and scheme validation.

Pipeline: weighted graph -> must-link/cannot-link modification -> normalized
Laplacian -> k smallest eigenpairs -> k-means on embedding rows -> connectivity
repair -> cut extraction on the pristine weights -> validation. The solve
either returns a scheme honoring every pairwise constraint with physically
connected islands, or raises.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import (
    CannotLinkViolationError,
    DisconnectedGraphError,
    IslandConnectivityError,
    MustLinkViolationError,
    UsageError,
)
from .clustering import KMeansConfig, kmeans
from .impedance import build_ybus, build_zbus
from .model import Network, Snapshot
from .spectral import Partition, spectral_embedding, total_cut
from .weights import (
    ConstraintSet,
    WeightedGraph,
    apply_coherence_constraints,
    apply_vsc_constraints,
    build_weighted_graph,
    degree_matrix,
)

log = logging.getLogger("islandctl.islanding")


@dataclass(frozen=True)
class SolveConfig:
    """Solver knobs; defaults reproduce the reference fixtures deterministically."""

    seed: int = 0
    restarts: int = 20
    max_iters: int = 300
    row_normalize: bool = True
    dc_distance: float | None = None
    dense_cutoff: int = 2000


@dataclass(frozen=True)
class CutLine:
    from_bus: int
    to_bus: int
    circuit: int
    weight: float  # aggregated pristine weight of the whole bus pair
    dc: bool

    @property
    def pair(self) -> tuple[int, int]:
        a, b = self.from_bus, self.to_bus
        return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class IslandStats:
    generation_p: float
    load_p: float
    imbalance_p: float
    has_generator: bool


@dataclass(frozen=True)
class LimitViolation:
    kind: str  # "generator-p" | "generator-q" | "voltage" | "vsc-p_s" | "vsc-q_s" | "pq-circle"
    entity: str
    value: float
    low: float
    high: float

    def describe(self) -> str:
        return f"{self.kind} at {self.entity}: {self.value:.4f} outside [{self.low:.4f}, {self.high:.4f}]"


@dataclass(frozen=True)
class LimitsReport:
    violations: tuple[LimitViolation, ...] = ()
    unchecked: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    coherence_violations: tuple[tuple[int, int], ...] = ()
    vsc_violations: tuple[tuple[int, int], ...] = ()
    disconnected_islands: tuple[int, ...] = ()
    limits: LimitsReport = field(default_factory=LimitsReport)
    islands_without_generation: tuple[int, ...] = ()

    @property
    def coherence_ok(self) -> bool:
        return not self.coherence_violations

    @property
    def vsc_ok(self) -> bool:
        return not self.vsc_violations

    @property
    def connectivity_ok(self) -> bool:
        return not self.disconnected_islands

    @property
    def ok(self) -> bool:
        return (
            self.coherence_ok
            and self.vsc_ok
            and self.connectivity_ok
            and not self.limits.violations
        )


@dataclass(frozen=True)
class IslandingScheme:
    k: int
    islands: tuple[frozenset[int], ...]  # ordered by smallest bus id
    cut_lines: tuple[CutLine, ...]
    cut_weight_sum: float
    composite_disruption: float
    per_island: tuple[IslandStats, ...]


def composite_disruption(original_graph: WeightedGraph, p: Partition) -> float:
    """Objective value of a partition: summed crossing weights on the original graph."""
    return total_cut(original_graph, p)


def extract_cut(original_graph: WeightedGraph, p: Partition) -> tuple[tuple[CutLine, ...], float]:
    """Physical branches crossing islands, with pristine weights.

    Parallel circuits are listed individually; the weight sum counts each
    aggregated bus pair once. Virtual (constraint-created) edges never appear.
    """
    labels = {original_graph.index.id_of(i): lab for i, lab in enumerate(p.labels)}
    lines: list[CutLine] = []
    weight_sum = 0.0
    for pair in sorted(original_graph.edges):
        edge = original_graph.edges[pair]
        if not edge.branches or labels[pair[0]] == labels[pair[1]]:
            continue
        weight = original_graph.pristine[pair]
        weight_sum += weight
        for br in edge.branches:
            lines.append(
                CutLine(
                    from_bus=pair[0],
                    to_bus=pair[1],
                    circuit=br.circuit,
                    weight=weight,
                    dc=br.kind == "vsc-dc-link",
                )
            )
    return tuple(lines), weight_sum


def island_imbalance(
    network: Network, snapshot: Snapshot, islands: tuple[frozenset[int], ...]
) -> tuple[IslandStats, ...]:
    """Per-island generation/load split of the snapshot's net active injections."""
    gen_buses = network.generator_buses
    stats = []
    for island in islands:
        gen = load = 0.0
        for bus in island:
            p = snapshot.injections.get(bus, (0.0, 0.0))[0]
            if p >= 0:
                gen += p
            else:
                load += -p
        stats.append(
            IslandStats(
                generation_p=gen,
                load_p=load,
                imbalance_p=gen - load,
                has_generator=bool(island & gen_buses),
            )
        )
    return tuple(stats)


def _island_components(graph: WeightedGraph, island: frozenset[int]) -> list[set[int]]:
    """Connected components of an island's induced physical subgraph."""
    adj = graph.physical_adjacency()
    remaining = set(island)
    comps = []
    while remaining:
        start = min(remaining)
        seen = {start}
        stack = [start]
        while stack:
            for nb in adj[stack.pop()]:
                if nb in island and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        comps.append(seen)
        remaining -= seen
    return sorted(comps, key=min)


def repair_connectivity(graph: WeightedGraph, p: Partition) -> Partition:
    """Reassign stray components of disconnected islands to neighboring islands.

    One component moves per step: among components without a generator bus in
    islands with >= 2 components, pick the (component, target) with the smallest
    total_cut increase on ``graph`` (ties: lowest source island, lowest bus,
    lowest target island). If every component of an island lacks generators, its
    largest component (ties: lowest bus) stays as the island core. The total
    component count drops each move, so this terminates.
    """
    adj = graph.physical_adjacency()
    labels = list(p.labels)

    def partition_islands(lbls) -> list[frozenset[int]]:
        out = [set() for _ in range(p.k)]
        for idx, lab in enumerate(lbls):
            out[lab].add(graph.index.id_of(idx))
        return [frozenset(s) for s in out]

    while True:
        islands = partition_islands(labels)
        movable: list[tuple[int, set[int]]] = []
        for isl_id, island in enumerate(islands):
            if not island:
                continue
            comps = _island_components(graph, island)
            if len(comps) < 2:
                continue
            with_gen = [c for c in comps if c & graph.generator_buses]
            if with_gen:
                movable.extend((isl_id, c) for c in comps if not (c & graph.generator_buses))
            else:
                keep = max(comps, key=lambda c: (len(c), -min(c)))
                movable.extend((isl_id, c) for c in comps if c is not keep)
        if not movable:
            break

        base_cut = total_cut(graph, Partition(labels=tuple(labels), k=p.k))
        best = None
        for isl_id, comp in sorted(movable, key=lambda mc: (mc[0], min(mc[1]))):
            neighbor_islands = set()
            for bus in comp:
                for nb in adj[bus]:
                    if nb not in comp:
                        neighbor_islands.add(labels[graph.index.index_of(nb)])
            neighbor_islands.discard(isl_id)
            if not neighbor_islands:
                raise IslandConnectivityError(
                    f"component {sorted(comp)} is adjacent to no other island"
                )
            for target in sorted(neighbor_islands):
                trial = list(labels)
                for bus in comp:
                    trial[graph.index.index_of(bus)] = target
                delta = total_cut(graph, Partition(labels=tuple(trial), k=p.k)) - base_cut
                key = (delta, isl_id, min(comp), target)
                if best is None or key < best[0]:
                    best = (key, trial)
        labels = best[1]

    return Partition(labels=tuple(labels), k=p.k)


def validate_coherence(
    islands: tuple[frozenset[int], ...],
    constraints: ConstraintSet,
    graph: WeightedGraph,
) -> tuple[tuple[int, int], ...]:
    """Violating generator pairs: same-group pairs split, cross-group pairs
    co-islanded, plus pairs bridged only through a disconnected island."""
    island_of: dict[int, int] = {}
    for idx, island in enumerate(islands):
        for bus in island:
            island_of[bus] = idx
    violations: list[tuple[int, int]] = []
    groups = [sorted(g) for g in constraints.coherent_groups]
    for grp in groups:
        for i, a in enumerate(grp):
            for b in grp[i + 1:]:
                if island_of[a] != island_of[b]:
                    violations.append((a, b) if a < b else (b, a))
    for gi, ga in enumerate(groups):
        for gb in groups[gi + 1:]:
            for a in ga:
                for b in gb:
                    if island_of[a] == island_of[b]:
                        violations.append((a, b) if a < b else (b, a))
    # the "interconnection" requirement: a same-group pair in a disconnected
    # island may lack a path inside it
    for idx, island in enumerate(islands):
        comps = _island_components(graph, island)
        if len(comps) < 2:
            continue
        comp_of = {bus: ci for ci, comp in enumerate(comps) for bus in comp}
        for grp in groups:
            members = [b for b in grp if island_of.get(b) == idx]
            for i, a in enumerate(members):
                for b in members[i + 1:]:
                    if comp_of[a] != comp_of[b]:
                        violations.append((a, b) if a < b else (b, a))
    return tuple(sorted(set(violations)))


def validate_vsc(
    islands: tuple[frozenset[int], ...], constraints: ConstraintSet
) -> tuple[tuple[int, int], ...]:
    """VSC terminal pairs sharing an island."""
    island_of: dict[int, int] = {}
    for idx, island in enumerate(islands):
        for bus in island:
            island_of[bus] = idx
    bad = [
        (min(a, b), max(a, b))
        for a, b in constraints.vsc_pairs
        if island_of.get(a) == island_of.get(b)
    ]
    return tuple(sorted(set(bad)))


def check_limits(network: Network, snapshot: Snapshot) -> LimitsReport:
    """Static limit checks against snapshot injections/voltages.

    Generator P/Q and VSC P_s/Q_s use the net bus injection; DC-side voltage and
    current are not observable from the snapshot schema and are reported
    unchecked, as is any quantity whose data is missing.
    """
    violations: list[LimitViolation] = []
    unchecked: list[str] = []

    for gen in network.generators:
        inj = snapshot.injections.get(gen.bus)
        if inj is None:
            unchecked.append(f"generator at bus {gen.bus}: no injection data")
            continue
        p, q = inj
        if not gen.p_min <= p <= gen.p_max:
            violations.append(LimitViolation("generator-p", f"bus {gen.bus}", p, gen.p_min, gen.p_max))
        if not gen.q_min <= q <= gen.q_max:
            violations.append(LimitViolation("generator-q", f"bus {gen.bus}", q, gen.q_min, gen.q_max))

    for bus in network.buses:
        if bus.u_min is None and bus.u_max is None:
            continue
        u = snapshot.voltages.get(bus.id)
        if u is None:
            unchecked.append(f"voltage at bus {bus.id}: no measurement")
            continue
        lo = bus.u_min if bus.u_min is not None else -float("inf")
        hi = bus.u_max if bus.u_max is not None else float("inf")
        if not lo <= u <= hi:
            violations.append(LimitViolation("voltage", f"bus {bus.id}", u, lo, hi))

    for link in network.vsc_links:
        for term in (link.terminal1, link.terminal2):
            inj = snapshot.injections.get(term)
            if inj is None:
                unchecked.append(f"vsc terminal {term}: no injection data")
                continue
            p_s, q_s = inj
            if not link.p_s_min <= p_s <= link.p_s_max:
                violations.append(
                    LimitViolation("vsc-p_s", f"terminal {term}", p_s, link.p_s_min, link.p_s_max)
                )
            if not link.q_s_min <= q_s <= link.q_s_max:
                violations.append(
                    LimitViolation("vsc-q_s", f"terminal {term}", q_s, link.q_s_min, link.q_s_max)
                )
            if link.pq_circle is not None:
                c = link.pq_circle
                r2 = (p_s - c.p0) ** 2 + (q_s - c.q0) ** 2
                if not c.r_min**2 <= r2 <= c.r_max**2:
                    violations.append(
                        LimitViolation("pq-circle", f"terminal {term}", r2**0.5, c.r_min, c.r_max)
                    )
        unchecked.append(f"vsc link {link.pair}: u_dc not observable in snapshot")
        unchecked.append(f"vsc link {link.pair}: i_dc not observable in snapshot")

    return LimitsReport(violations=tuple(violations), unchecked=tuple(unchecked))


def _needs_zbus(network: Network, snapshot: Snapshot) -> bool:
    return any(
        pair not in snapshot.weight_overrides and any(b.kind == "ac-line" for b in branches)
        for pair, branches in network.branches_by_pair().items()
    )


def solve_islanding(
    network: Network,
    snapshot: Snapshot,
    constraints: ConstraintSet,
    k: int,
    config: SolveConfig = SolveConfig(),
) -> tuple[IslandingScheme, ValidationReport]:
    """Split the network into k islands honoring the pairwise constraints.

    Raises on zero-degree buses, a disconnected constrained graph, k not
    matching the coherent-group count, or any constraint violated by the
    clustering outcome (big-M insufficiency surfaces here).
    """
    if k < 2:
        raise UsageError(f"k must be >= 2, got {k}")
    if constraints.group_count and k != constraints.group_count:
        raise UsageError(
            f"k={k} does not match the number of coherent groups ({constraints.group_count})"
        )

    zbus = None
    if _needs_zbus(network, snapshot):
        zbus = build_zbus(build_ybus(network), network.bus_index)
    original = build_weighted_graph(network, snapshot, zbus, dc_distance=config.dc_distance)

    g = apply_coherence_constraints(original, constraints)
    g = apply_vsc_constraints(g, constraints)
    degrees = degree_matrix(g)
    if not g.connected():
        raise DisconnectedGraphError(
            "constrained graph is disconnected; the requested split is ill-posed"
        )

    embedding = spectral_embedding(g, degrees, k, dense_cutoff=config.dense_cutoff)
    points = embedding.clustering_rows(row_normalize=config.row_normalize)
    result = kmeans(points, k, KMeansConfig(seed=config.seed, restarts=config.restarts,
                                            max_iters=config.max_iters))
    partition = repair_connectivity(g, result.assignment)
    partition = partition.relabeled_by_min_bus(g.index)
    islands = tuple(frozenset(s) for s in partition.islands(g.index))

    coh = validate_coherence(islands, constraints, g)
    if coh:
        split = [pair for pair in coh if _same_group(pair, constraints)]
        if split:
            raise MustLinkViolationError(
                f"must-link generator pairs {split} landed in different islands; "
                "big_m_factor is too small"
            )
        raise CannotLinkViolationError(
            f"non-coherent generator pairs {list(coh)} share an island"
        )
    vsc_bad = validate_vsc(islands, constraints)
    if vsc_bad:
        raise CannotLinkViolationError(
            f"VSC terminal pairs {list(vsc_bad)} share an island"
        )
    disconnected = tuple(
        i for i, island in enumerate(islands) if len(_island_components(g, island)) > 1
    )
    if disconnected:
        raise IslandConnectivityError(
            f"islands {list(disconnected)} remain physically disconnected after repair"
        )

    cut_lines, cut_sum = extract_cut(original, partition)
    per_island = island_imbalance(network, snapshot, islands)
    no_gen = tuple(i for i, s in enumerate(per_island) if not s.has_generator)
    if no_gen:
        log.warning("islands without generation: %s", list(no_gen))

    scheme = IslandingScheme(
        k=k,
        islands=islands,
        cut_lines=cut_lines,
        cut_weight_sum=cut_sum,
        composite_disruption=composite_disruption(original, partition),
        per_island=per_island,
    )
    report = ValidationReport(
        coherence_violations=coh,
        vsc_violations=vsc_bad,
        disconnected_islands=disconnected,
        limits=check_limits(network, snapshot),
        islands_without_generation=no_gen,
    )
    return scheme, report


def _same_group(pair: tuple[int, int], constraints: ConstraintSet) -> bool:
    return any(pair[0] in grp and pair[1] in grp for grp in constraints.coherent_groups)
