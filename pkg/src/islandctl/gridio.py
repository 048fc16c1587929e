"""File formats: network, snapshot, constraints and scheme documents.

All files are JSON. Parse errors carry the JSON location; structural errors
carry the offending field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .errors import ParseError, ValidationError
from .islanding import IslandingScheme, ValidationReport
from .model import Branch, Bus, Generator, Network, PqCircle, Snapshot, VscLink
from .weights import ConstraintSet


def _load_json(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing required field {key!r}")
    return obj[key]


def _num(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected a list")
    return value


def parse_network(text: str) -> Network:
    """Parse and validate a network file."""
    doc = _load_json(text, "network file")
    if not isinstance(doc, dict):
        raise ParseError("network file: top level must be an object")

    buses = []
    for i, entry in enumerate(_list(_require(doc, "buses", "network file"), "buses")):
        where = f"buses[{i}]"
        buses.append(
            Bus(
                id=_int(_require(entry, "id", where), f"{where}.id"),
                kind=entry.get("kind", "load"),
                u_min=_num(entry["u_min"], f"{where}.u_min") if "u_min" in entry else None,
                u_max=_num(entry["u_max"], f"{where}.u_max") if "u_max" in entry else None,
                g_shunt=_num(entry.get("g_shunt", 0.0), f"{where}.g_shunt"),
                b_shunt=_num(entry.get("b_shunt", 0.0), f"{where}.b_shunt"),
            )
        )

    branches = []
    for i, entry in enumerate(_list(_require(doc, "branches", "network file"), "branches")):
        where = f"branches[{i}]"
        branches.append(
            Branch(
                from_bus=_int(_require(entry, "from", where), f"{where}.from"),
                to_bus=_int(_require(entry, "to", where), f"{where}.to"),
                circuit=_int(entry.get("circuit", 1), f"{where}.circuit"),
                r=_num(entry.get("r", 0.0), f"{where}.r"),
                x=_num(entry.get("x", 0.0), f"{where}.x"),
                kind=entry.get("kind", "ac-line"),
            )
        )

    generators = []
    for i, entry in enumerate(_list(doc.get("generators", []), "generators")):
        where = f"generators[{i}]"
        generators.append(
            Generator(
                bus=_int(_require(entry, "bus", where), f"{where}.bus"),
                p_min=_num(entry.get("p_min", 0.0), f"{where}.p_min"),
                p_max=_num(entry.get("p_max", 0.0), f"{where}.p_max"),
                q_min=_num(entry.get("q_min", 0.0), f"{where}.q_min"),
                q_max=_num(entry.get("q_max", 0.0), f"{where}.q_max"),
            )
        )

    links = []
    for i, entry in enumerate(_list(doc.get("vsc_links", []), "vsc_links")):
        where = f"vsc_links[{i}]"
        circle = None
        if "pq_circle" in entry and entry["pq_circle"] is not None:
            c = entry["pq_circle"]
            circle = PqCircle(
                p0=_num(_require(c, "p0", f"{where}.pq_circle"), f"{where}.pq_circle.p0"),
                q0=_num(_require(c, "q0", f"{where}.pq_circle"), f"{where}.pq_circle.q0"),
                r_min=_num(_require(c, "r_min", f"{where}.pq_circle"), f"{where}.pq_circle.r_min"),
                r_max=_num(_require(c, "r_max", f"{where}.pq_circle"), f"{where}.pq_circle.r_max"),
            )
        kwargs = {}
        for name in ("p_s_min", "p_s_max", "q_s_min", "q_s_max",
                     "u_dc_min", "u_dc_max", "i_dc_min", "i_dc_max"):
            if name in entry:
                kwargs[name] = _num(entry[name], f"{where}.{name}")
        links.append(
            VscLink(
                terminal1=_int(_require(entry, "t1", where), f"{where}.t1"),
                terminal2=_int(_require(entry, "t2", where), f"{where}.t2"),
                pq_circle=circle,
                **kwargs,
            )
        )

    return Network(
        base_mva=_num(_require(doc, "base_mva", "network file"), "base_mva"),
        buses=tuple(buses),
        branches=tuple(branches),
        generators=tuple(generators),
        vsc_links=tuple(links),
        ground_shunt_epsilon=_num(doc.get("ground_shunt_epsilon", 1e-6), "ground_shunt_epsilon"),
    )


def serialize_network(network: Network) -> str:
    """Serialize a Network; parse(serialize(n)) == n."""
    doc: dict[str, Any] = {"base_mva": network.base_mva}
    buses = []
    for b in network.buses:
        entry: dict[str, Any] = {"id": b.id, "kind": b.kind}
        if b.u_min is not None:
            entry["u_min"] = b.u_min
        if b.u_max is not None:
            entry["u_max"] = b.u_max
        if b.g_shunt or b.b_shunt:
            entry["g_shunt"] = b.g_shunt
            entry["b_shunt"] = b.b_shunt
        buses.append(entry)
    doc["buses"] = buses
    doc["branches"] = [
        {"from": br.from_bus, "to": br.to_bus, "circuit": br.circuit,
         "r": br.r, "x": br.x, "kind": br.kind}
        for br in network.branches
    ]
    doc["generators"] = [
        {"bus": g.bus, "p_min": g.p_min, "p_max": g.p_max, "q_min": g.q_min, "q_max": g.q_max}
        for g in network.generators
    ]
    vsc = []
    for l in network.vsc_links:
        entry = {
            "t1": l.terminal1, "t2": l.terminal2,
            "p_s_min": l.p_s_min, "p_s_max": l.p_s_max,
            "q_s_min": l.q_s_min, "q_s_max": l.q_s_max,
            "u_dc_min": l.u_dc_min, "u_dc_max": l.u_dc_max,
            "i_dc_min": l.i_dc_min, "i_dc_max": l.i_dc_max,
        }
        if l.pq_circle is not None:
            entry["pq_circle"] = {
                "p0": l.pq_circle.p0, "q0": l.pq_circle.q0,
                "r_min": l.pq_circle.r_min, "r_max": l.pq_circle.r_max,
            }
        vsc.append(entry)
    doc["vsc_links"] = vsc
    doc["ground_shunt_epsilon"] = network.ground_shunt_epsilon
    return json.dumps(doc, indent=2) + "\n"


def parse_snapshot(text: str, network: Network) -> Snapshot:
    """Parse a snapshot file and validate it against the network."""
    doc = _load_json(text, "snapshot file")
    if not isinstance(doc, dict):
        raise ParseError("snapshot file: top level must be an object")

    flows: dict = {}
    for i, entry in enumerate(_list(doc.get("flows", []), "flows")):
        where = f"flows[{i}]"
        f = _int(_require(entry, "from", where), f"{where}.from")
        t = _int(_require(entry, "to", where), f"{where}.to")
        c = _int(entry.get("circuit", 1), f"{where}.circuit")
        if "p_ij" not in entry or "p_ji" not in entry:
            raise ValidationError(
                f"{where}: branch ({f}, {t}, {c}) missing a flow direction (need both p_ij and p_ji)"
            )
        flows[(f, t, c)] = (_num(entry["p_ij"], f"{where}.p_ij"), _num(entry["p_ji"], f"{where}.p_ji"))

    injections: dict = {}
    for i, entry in enumerate(_list(doc.get("injections", []), "injections")):
        where = f"injections[{i}]"
        bus = _int(_require(entry, "bus", where), f"{where}.bus")
        injections[bus] = (_num(entry.get("p", 0.0), f"{where}.p"), _num(entry.get("q", 0.0), f"{where}.q"))

    voltages: dict = {}
    for i, entry in enumerate(_list(doc.get("voltages", []), "voltages")):
        where = f"voltages[{i}]"
        voltages[_int(_require(entry, "bus", where), f"{where}.bus")] = _num(
            _require(entry, "u", where), f"{where}.u"
        )

    overrides: dict = {}
    for i, entry in enumerate(_list(doc.get("weights", []), "weights")):
        where = f"weights[{i}]"
        f = _int(_require(entry, "from", where), f"{where}.from")
        t = _int(_require(entry, "to", where), f"{where}.to")
        pair = (f, t) if f < t else (t, f)
        overrides[pair] = _num(_require(entry, "w", where), f"{where}.w")

    snap = Snapshot(
        timestamp=str(doc.get("timestamp", "")),
        flows=flows,
        injections=injections,
        voltages=voltages,
        weight_overrides=overrides,
    )
    snap.validate_against(network)
    return snap


def parse_constraints(text: str, network: Network) -> ConstraintSet:
    """Parse a constraints file ({coherent_groups, vsc_pairs}) against the network."""
    doc = _load_json(text, "constraints file")
    if not isinstance(doc, dict):
        raise ParseError("constraints file: top level must be an object")
    groups = []
    for i, grp in enumerate(_list(doc.get("coherent_groups", []), "coherent_groups")):
        where = f"coherent_groups[{i}]"
        groups.append(frozenset(_int(b, where) for b in _list(grp, where)))
    pairs = []
    for i, pair in enumerate(_list(doc.get("vsc_pairs", []), "vsc_pairs")):
        where = f"vsc_pairs[{i}]"
        entries = [_int(b, where) for b in _list(pair, where)]
        if len(entries) != 2:
            raise ParseError(f"{where}: expected exactly two buses")
        pairs.append((entries[0], entries[1]))
    cs = ConstraintSet(
        coherent_groups=tuple(groups),
        vsc_pairs=tuple(pairs),
        big_m_factor=_num(doc.get("big_m_factor", 1e4), "big_m_factor"),
    )
    cs.validate_against(network)
    return cs


def serialize_scheme(
    scheme: IslandingScheme,
    report: ValidationReport,
    timings_ms: float | None = None,
) -> str:
    """Deterministic scheme document; identical solves serialize byte-identically
    (``timings_ms`` is the one caller-supplied wall-clock field)."""
    doc: dict[str, Any] = {
        "k": scheme.k,
        "islands": [sorted(island) for island in scheme.islands],
        "cut_lines": [
            {"from": cl.from_bus, "to": cl.to_bus, "circuit": cl.circuit,
             "w": cl.weight, "dc": cl.dc}
            for cl in scheme.cut_lines
        ],
        "cut_weight_sum": scheme.cut_weight_sum,
        "composite_disruption": scheme.composite_disruption,
        "per_island": [
            {"generation_p": s.generation_p, "load_p": s.load_p,
             "imbalance_p": s.imbalance_p, "has_generator": s.has_generator}
            for s in scheme.per_island
        ],
        "validation": {
            "coherence_ok": report.coherence_ok,
            "coherence_violations": [list(p) for p in report.coherence_violations],
            "vsc_ok": report.vsc_ok,
            "vsc_violations": [list(p) for p in report.vsc_violations],
            "connectivity_ok": report.connectivity_ok,
            "disconnected_islands": list(report.disconnected_islands),
            "limit_violations": [v.describe() for v in report.limits.violations],
            "limits_unchecked": list(report.limits.unchecked),
            "islands_without_generation": list(report.islands_without_generation),
        },
        "timings_ms": timings_ms,
    }
    return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class SchemeDoc:
    """A scheme output file read back for validation or reporting."""

    k: int
    islands: tuple[frozenset[int], ...]
    cut_lines: tuple[dict, ...]
    cut_weight_sum: float | None
    composite_disruption: float | None
    raw: dict


def parse_scheme(text: str) -> SchemeDoc:
    doc = _load_json(text, "scheme file")
    if not isinstance(doc, dict):
        raise ParseError("scheme file: top level must be an object")
    islands = []
    for i, isl in enumerate(_list(_require(doc, "islands", "scheme file"), "islands")):
        islands.append(frozenset(_int(b, f"islands[{i}]") for b in _list(isl, f"islands[{i}]")))
    if not islands:
        raise ValidationError("scheme file: no islands")
    cut_lines = tuple(dict(e) for e in _list(doc.get("cut_lines", []), "cut_lines"))
    return SchemeDoc(
        k=int(doc.get("k", len(islands))),
        islands=tuple(islands),
        cut_lines=cut_lines,
        cut_weight_sum=doc.get("cut_weight_sum"),
        composite_disruption=doc.get("composite_disruption"),
        raw=doc,
    )
