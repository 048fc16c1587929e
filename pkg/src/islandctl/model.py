"""Static grid model and operating snapshot.

All types are immutable after construction and safe to share across threads.
Invariants are enforced at construction time; violations raise
:class:`~islandctl.errors.ValidationError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError

BUS_KINDS = ("load", "generator", "vsc-terminal")
BRANCH_KINDS = ("ac-line", "vsc-dc-link")

BranchKey = tuple[int, int, int]  # (from_bus, to_bus, circuit)


@dataclass(frozen=True)
class Bus:
    """A network bus. ``g_shunt``/``b_shunt`` are admittances to ground (p.u.)."""

    id: int
    kind: str = "load"
    u_min: float | None = None
    u_max: float | None = None
    g_shunt: float = 0.0
    b_shunt: float = 0.0

    def __post_init__(self):
        if self.kind not in BUS_KINDS:
            raise ValidationError(f"bus {self.id}: unknown kind {self.kind!r}")
        if self.u_min is not None and self.u_max is not None and not self.u_min < self.u_max:
            raise ValidationError(
                f"bus {self.id}: voltage limits not ordered (u_min={self.u_min}, u_max={self.u_max})"
            )


@dataclass(frozen=True)
class Branch:
    """A series branch between two buses; parallel circuits share endpoints."""

    from_bus: int
    to_bus: int
    circuit: int = 1
    r: float = 0.0
    x: float = 0.0
    kind: str = "ac-line"

    def __post_init__(self):
        if self.kind not in BRANCH_KINDS:
            raise ValidationError(f"branch {self.key}: unknown kind {self.kind!r}")
        if self.from_bus == self.to_bus:
            raise ValidationError(f"branch {self.key}: from_bus == to_bus")
        if self.kind == "ac-line" and abs(self.impedance) <= 0.0:
            raise ValidationError(f"branch {self.key}: ac-line with zero impedance")

    @property
    def impedance(self) -> complex:
        return complex(self.r, self.x)

    @property
    def key(self) -> BranchKey:
        return (self.from_bus, self.to_bus, self.circuit)

    @property
    def pair(self) -> tuple[int, int]:
        """Endpoint pair in canonical (low, high) order."""
        a, b = self.from_bus, self.to_bus
        return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Generator:
    bus: int
    p_min: float = 0.0
    p_max: float = 0.0
    q_min: float = 0.0
    q_max: float = 0.0

    def __post_init__(self):
        if self.p_min > self.p_max:
            raise ValidationError(f"generator at bus {self.bus}: p_min > p_max")
        if self.q_min > self.q_max:
            raise ValidationError(f"generator at bus {self.bus}: q_min > q_max")


@dataclass(frozen=True)
class PqCircle:
    """PQ-capability circle: center (p0, q0), admissible radius [r_min, r_max]."""

    p0: float
    q0: float
    r_min: float
    r_max: float

    def __post_init__(self):
        if self.r_min > self.r_max:
            raise ValidationError("pq_circle: r_min > r_max")


@dataclass(frozen=True)
class VscLink:
    """A two-terminal VSC-HVDC link. The DC conductor may additionally be modeled
    as a ``vsc-dc-link`` branch; a link without a branch carries no graph edge."""

    terminal1: int
    terminal2: int
    p_s_min: float = -1e9
    p_s_max: float = 1e9
    q_s_min: float = -1e9
    q_s_max: float = 1e9
    u_dc_min: float = 0.0
    u_dc_max: float = 1e9
    i_dc_min: float = 0.0
    i_dc_max: float = 1e9
    pq_circle: PqCircle | None = None

    def __post_init__(self):
        if self.terminal1 == self.terminal2:
            raise ValidationError("vsc link: terminal1 == terminal2")
        for lo, hi, name in (
            (self.p_s_min, self.p_s_max, "p_s"),
            (self.q_s_min, self.q_s_max, "q_s"),
            (self.u_dc_min, self.u_dc_max, "u_dc"),
            (self.i_dc_min, self.i_dc_max, "i_dc"),
        ):
            if lo > hi:
                raise ValidationError(f"vsc link {self.pair}: {name} limits not ordered")

    @property
    def pair(self) -> tuple[int, int]:
        a, b = self.terminal1, self.terminal2
        return (a, b) if a < b else (b, a)


class BusIndex:
    """Bijection between bus ids and dense matrix row indices (ids sorted ascending)."""

    __slots__ = ("ids", "_pos")

    def __init__(self, bus_ids):
        self.ids: tuple[int, ...] = tuple(sorted(bus_ids))
        self._pos = {b: i for i, b in enumerate(self.ids)}

    def __len__(self) -> int:
        return len(self.ids)

    def index_of(self, bus_id: int) -> int:
        try:
            return self._pos[bus_id]
        except KeyError:
            raise ValidationError(f"unknown bus id {bus_id}") from None

    def id_of(self, index: int) -> int:
        return self.ids[index]

    def __eq__(self, other):
        return isinstance(other, BusIndex) and self.ids == other.ids

    def __hash__(self):
        return hash(self.ids)


@dataclass(frozen=True)
class Network:
    """Validated static grid description."""

    base_mva: float
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    generators: tuple[Generator, ...] = ()
    vsc_links: tuple[VscLink, ...] = ()
    ground_shunt_epsilon: float = 1e-6

    def __post_init__(self):
        if self.base_mva <= 0:
            raise ValidationError(f"base_mva must be positive, got {self.base_mva}")
        if self.ground_shunt_epsilon < 0:
            raise ValidationError("ground_shunt_epsilon must be nonnegative")
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate bus ids {dup}")
        known = set(ids)
        keys = set()
        for br in self.branches:
            for end in (br.from_bus, br.to_bus):
                if end not in known:
                    raise ValidationError(f"branch {br.key}: dangling bus reference {end}")
            if br.key in keys:
                raise ValidationError(f"duplicate branch key {br.key}")
            keys.add(br.key)
        for g in self.generators:
            if g.bus not in known:
                raise ValidationError(f"generator: dangling bus reference {g.bus}")
        link_pairs = {l.pair for l in self.vsc_links}
        for l in self.vsc_links:
            for end in (l.terminal1, l.terminal2):
                if end not in known:
                    raise ValidationError(f"vsc link: dangling bus reference {end}")
        for br in self.branches:
            if br.kind == "vsc-dc-link" and br.pair not in link_pairs:
                raise ValidationError(
                    f"dc branch {br.key} has no matching vsc link entry"
                )
        self._check_ac_connected()

    def _check_ac_connected(self):
        if not self.buses:
            raise ValidationError("network has no buses")
        adj: dict[int, set[int]] = {b.id: set() for b in self.buses}
        for br in self.branches:
            if br.kind == "ac-line":
                adj[br.from_bus].add(br.to_bus)
                adj[br.to_bus].add(br.from_bus)
        start = self.buses[0].id
        seen = {start}
        stack = [start]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) != len(self.buses):
            orphan = sorted(set(adj) - seen)
            raise ValidationError(f"AC graph disconnected; unreachable buses {orphan}")

    @property
    def bus_index(self) -> BusIndex:
        return BusIndex(b.id for b in self.buses)

    @property
    def generator_buses(self) -> frozenset[int]:
        """Buses hosting a generator (union of the generator list and kind labels)."""
        hosts = {g.bus for g in self.generators}
        hosts.update(b.id for b in self.buses if b.kind == "generator")
        return frozenset(hosts)

    @property
    def vsc_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(l.pair for l in self.vsc_links)

    def branches_by_pair(self) -> dict[tuple[int, int], tuple[Branch, ...]]:
        """Group branches (all kinds, parallel circuits together) by endpoint pair."""
        out: dict[tuple[int, int], list[Branch]] = {}
        for br in self.branches:
            out.setdefault(br.pair, []).append(br)
        return {p: tuple(sorted(bl, key=lambda b: b.key)) for p, bl in out.items()}


@dataclass(frozen=True)
class Snapshot:
    """Solved operating point: directed branch flows and bus injections (p.u.).

    ``weight_overrides`` maps canonical bus pairs to fixed edge weights, replacing
    the flow/distance computation for those edges (the fixture mechanism).
    """

    timestamp: str
    flows: dict[BranchKey, tuple[float, float]] = field(default_factory=dict)
    injections: dict[int, tuple[float, float]] = field(default_factory=dict)
    voltages: dict[int, float] = field(default_factory=dict)
    weight_overrides: dict[tuple[int, int], float] = field(default_factory=dict)

    def validate_against(self, network: Network) -> None:
        """Check every flow/injection/override key references the network."""
        branch_keys = {br.key for br in network.branches}
        alt = {(t, f, c) for (f, t, c) in branch_keys}
        for key in self.flows:
            if key not in branch_keys and key not in alt:
                raise ValidationError(f"snapshot flow references unknown branch {key}")
        known = {b.id for b in network.buses}
        for bus in self.injections:
            if bus not in known:
                raise ValidationError(f"snapshot injection references unknown bus {bus}")
        for bus in self.voltages:
            if bus not in known:
                raise ValidationError(f"snapshot voltage references unknown bus {bus}")
        pairs = set(network.branches_by_pair())
        for pair in self.weight_overrides:
            if pair not in pairs:
                raise ValidationError(f"weight override references unknown edge {pair}")

    def flow_for(self, branch: Branch) -> tuple[float, float] | None:
        """Directed (p_ij, p_ji) for a branch, honoring endpoint order."""
        key = branch.key
        if key in self.flows:
            return self.flows[key]
        rkey = (branch.to_bus, branch.from_bus, branch.circuit)
        if rkey in self.flows:
            pj, pi = self.flows[rkey]
            return (pi, pj)
        return None
