"""Shared fixtures: reference systems, toy networks, cached heavy statistics."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

import islandctl as ic

FIXTURES = Path(__file__).parents[1] / "fixtures"

# reference weighted-graph data (the published nonzero entries)
W39 = {
    (1, 2): 48.41, (1, 39): 43.12, (2, 3): 29.56, (2, 25): 25.36, (2, 30): 33.84,
    (3, 4): 6.12, (3, 18): 2.62, (4, 5): 16.41, (4, 14): 9.28, (5, 6): 212.81,
    (5, 8): 52.33, (6, 7): 70.28, (6, 11): 45.72, (6, 31): 27.63, (7, 8): 47.89,
    (8, 9): 1.09, (9, 39): 30.99, (10, 11): 88.10, (10, 13): 74.90, (10, 32): 32.39,
    (11, 12): 0.075, (12, 13): 0.28, (13, 14): 31.61, (14, 15): 2.07, (15, 16): 32.89,
    (16, 17): 25.16, (16, 19): 23.06, (16, 21): 29.32, (16, 24): 7.79, (17, 18): 26.67,
    (17, 27): 0.99, (19, 20): 12.53, (19, 33): 43.50, (20, 34): 28.12, (21, 22): 52.58,
    (22, 23): 5.08, (22, 35): 45.49, (23, 24): 18.13, (23, 36): 20.58, (25, 26): 3.33,
    (25, 37): 23.76, (26, 27): 20.84, (26, 28): 4.65, (26, 29): 5.91, (28, 29): 26.04,
    (29, 38): 53.54,
}
WXM = {
    (1, 2): 23.65, (1, 5): 53.4, (1, 14): 67.77, (2, 4): 1.49, (2, 5): 22.62,
    (3, 4): 74.64, (3, 10): 33.03, (3, 28): 22.26, (5, 6): 50.25, (6, 7): 34.16,
    (7, 8): 21.35, (7, 14): 25.76, (8, 9): 23.46, (8, 14): 37.44, (9, 10): 5.5,
    (10, 21): 45.8, (11, 12): 21.41, (11, 13): 6.47, (11, 14): 16.53, (11, 15): 11.28,
    (13, 14): 6.48, (14, 15): 9.08, (15, 16): 15.04, (16, 17): 27.89, (17, 18): 56.0,
    (17, 22): 10.7, (17, 23): 20.32, (18, 19): 9.63, (18, 25): 24.93, (20, 21): 14.21,
    (20, 25): 33.52, (23, 24): 1.04, (24, 25): 24.72, (24, 26): 51.62, (26, 27): 22.68,
    (27, 28): 3.42,
}
GROUPS39 = ({30, 39}, {31, 32, 33, 34, 35, 36}, {37, 38})
GROUPS_XM = ({1, 2, 14, 17}, {4, 24})

# published reference partitions / cut sets
REFERENCE_PARTITION_39 = (  # the conventional-constraints published grouping
    frozenset({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 25, 30, 31, 32, 37, 39}),
    frozenset({15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 33, 34, 35, 36}),
    frozenset({26, 27, 28, 29, 38}),
)
COHERENCE_CUT_39 = {(2, 25), (3, 4), (3, 18), (8, 9), (17, 27)}
FULL_CUT_39 = {(2, 25), (3, 18), (4, 5), (4, 14), (8, 9), (17, 27)}
CUT_XM = {(2, 4), (9, 10), (18, 25), (23, 24)}

OPTIMAL_PARTITION_39 = (  # full-constraint islands implied by FULL_CUT_39
    frozenset({1, 2, 3, 4, 9, 30, 39}),
    frozenset({5, 6, 7, 8, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24,
               31, 32, 33, 34, 35, 36}),
    frozenset({25, 26, 27, 28, 29, 37, 38}),
)


def load(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def ieee39():
    net = ic.parse_network(load("ieee39.network.json"))
    snap = ic.parse_snapshot(load("ieee39.snapshot.json"), net)
    return net, snap


@pytest.fixture(scope="session")
def ieee39_graph(ieee39):
    net, snap = ieee39
    return ic.build_weighted_graph(net, snap, None)


@pytest.fixture(scope="session")
def xiamen():
    net = ic.parse_network(load("xiamen.network.json"))
    snap = ic.parse_snapshot(load("xiamen.snapshot.json"), net)
    return net, snap


@pytest.fixture(scope="session")
def twobus():
    net = ic.parse_network(load("twobus.network.json"))
    snap = ic.parse_snapshot(load("twobus.snapshot.json"), net)
    return net, snap


@pytest.fixture(scope="session")
def coherence_constraints(ieee39):
    return ic.parse_constraints(load("ieee39.constraints.coherence.json"), ieee39[0])


@pytest.fixture(scope="session")
def full_constraints(ieee39):
    return ic.parse_constraints(load("ieee39.constraints.full.json"), ieee39[0])


@pytest.fixture(scope="session")
def xiamen_constraints(xiamen):
    return ic.parse_constraints(load("xiamen.constraints.json"), xiamen[0])


def toy_network(edges, generators=(), vsc_pairs=(), weights=None, injections=None):
    """Small synthetic system: unit-impedance lines, weight overrides, net injections."""
    nodes = sorted({b for e in edges for b in e})
    gen_set = set(generators)
    buses = tuple(
        ic.Bus(id=b, kind="generator" if b in gen_set else "load") for b in nodes
    )
    branches = tuple(
        ic.Branch(from_bus=a, to_bus=b, circuit=1, r=0.01, x=0.1) for a, b in edges
    )
    net = ic.Network(
        base_mva=100.0,
        buses=buses,
        branches=branches,
        generators=tuple(ic.Generator(bus=b, p_min=-10, p_max=10, q_min=-10, q_max=10)
                         for b in sorted(gen_set)),
        vsc_links=tuple(ic.VscLink(terminal1=a, terminal2=b) for a, b in vsc_pairs),
    )
    overrides = {}
    if weights is not None:
        overrides = {(min(a, b), max(a, b)): w for (a, b), w in weights.items()}
    snap = ic.Snapshot(
        timestamp="t0",
        flows={} if weights is not None else {
            br.key: (1.0, -1.0) for br in branches
        },
        injections=injections or {b: (1.0 if b in gen_set else -0.5, 0.0) for b in nodes},
        weight_overrides=overrides,
    )
    snap.validate_against(net)
    return net, snap


def graph_from_weights(weights, generators=(), vsc_pairs=()):
    """WeightedGraph straight from an edge->weight map (unit-impedance carrier net)."""
    net, snap = toy_network(list(weights), generators, vsc_pairs, weights=weights)
    return ic.build_weighted_graph(net, snap, None)
