"""Network/snapshot parsing, invariants, and round-trip identity."""

import pytest

import islandctl as ic
from islandctl.errors import ParseError, ValidationError

MINIMAL = """
{
  "base_mva": 100.0,
  "buses": [{"id": 1, "kind": "generator"}, {"id": 2, "kind": "load"}],
  "branches": [{"from": 1, "to": 2, "circuit": 1, "r": 0.01, "x": 0.1, "kind": "ac-line"}],
  "generators": [{"bus": 1, "p_min": 0.0, "p_max": 1.0, "q_min": -1.0, "q_max": 1.0}],
  "vsc_links": []
}
"""


def test_minimal_two_bus_network():
    net = ic.parse_network(MINIMAL)
    assert len(net.buses) == 2
    assert len(net.branches) == 1
    assert net.generator_buses == {1}


def test_ieee39_fixture_shape(ieee39):
    net, _ = ieee39
    assert len(net.buses) == 39
    kinds = [br.kind for br in net.branches]
    assert kinds.count("ac-line") == 45
    assert kinds.count("vsc-dc-link") == 1
    assert len(net.generators) == 10
    assert net.vsc_pairs == {(4, 14)}


def test_dangling_branch_reference():
    bad = MINIMAL.replace('"to": 2', '"to": 99')
    with pytest.raises(ValidationError, match="dangling bus reference 99"):
        ic.parse_network(bad)


def test_duplicate_bus_id():
    bad = MINIMAL.replace('{"id": 2, "kind": "load"}', '{"id": 1, "kind": "load"}')
    with pytest.raises(ValidationError, match="duplicate bus ids"):
        ic.parse_network(bad)


def test_disconnected_ac_graph_rejected():
    doc = """
    {
      "base_mva": 100.0,
      "buses": [{"id": 1}, {"id": 2}, {"id": 3}],
      "branches": [{"from": 1, "to": 2, "r": 0.01, "x": 0.1}],
      "generators": []
    }
    """
    with pytest.raises(ValidationError, match="disconnected"):
        ic.parse_network(doc)


def test_bad_voltage_limit_ordering():
    bad = MINIMAL.replace('{"id": 1, "kind": "generator"}',
                          '{"id": 1, "kind": "generator", "u_min": 1.1, "u_max": 0.9}')
    with pytest.raises(ValidationError, match="voltage limits not ordered"):
        ic.parse_network(bad)


def test_zero_impedance_ac_line_rejected():
    bad = MINIMAL.replace('"r": 0.01, "x": 0.1', '"r": 0.0, "x": 0.0')
    with pytest.raises(ValidationError, match="zero impedance"):
        ic.parse_network(bad)


def test_dc_branch_requires_matching_link():
    doc = MINIMAL.replace('"kind": "ac-line"', '"kind": "ac-line"}, '
                          '{"from": 1, "to": 2, "circuit": 2, "r": 0.0, "x": 0.5, "kind": "vsc-dc-link"')
    with pytest.raises(ValidationError, match="no matching vsc link"):
        ic.parse_network(doc)


def test_invalid_json_reports_location():
    with pytest.raises(ParseError, match="line"):
        ic.parse_network("{not json}")


def test_missing_field_reports_path():
    with pytest.raises(ParseError, match=r"branches\[0\]"):
        ic.parse_network(MINIMAL.replace('"from": 1, ', ""))


def test_parse_serialize_parse_identity(ieee39, xiamen, twobus):
    for net in (ieee39[0], xiamen[0], twobus[0]):
        again = ic.parse_network(ic.serialize_network(net))
        assert again == net


# --- snapshots ---------------------------------------------------------------


def test_snapshot_with_both_directions_accepted():
    net = ic.parse_network(MINIMAL)
    snap = ic.parse_snapshot(
        '{"timestamp": "t", "flows": [{"from": 1, "to": 2, "circuit": 1, "p_ij": 0.5, "p_ji": -0.49}]}',
        net,
    )
    assert snap.flows[(1, 2, 1)] == (0.5, -0.49)


def test_snapshot_missing_direction_rejected():
    net = ic.parse_network(MINIMAL)
    with pytest.raises(ValidationError, match="missing a flow direction"):
        ic.parse_snapshot(
            '{"timestamp": "t", "flows": [{"from": 1, "to": 2, "circuit": 1, "p_ij": 0.5}]}', net
        )


def test_snapshot_unknown_branch_rejected():
    net = ic.parse_network(MINIMAL)
    with pytest.raises(ValidationError, match=r"unknown branch \(5, 99, 1\)"):
        ic.parse_snapshot(
            '{"timestamp": "t", "flows": [{"from": 5, "to": 99, "circuit": 1, "p_ij": 0, "p_ji": 0}]}',
            net,
        )


def test_snapshot_reversed_key_is_same_branch():
    net = ic.parse_network(MINIMAL)
    snap = ic.parse_snapshot(
        '{"timestamp": "t", "flows": [{"from": 2, "to": 1, "circuit": 1, "p_ij": -0.49, "p_ji": 0.5}]}',
        net,
    )
    assert snap.flow_for(net.branches[0]) == (0.5, -0.49)


def test_weight_override_unknown_edge_rejected():
    net = ic.parse_network(MINIMAL)
    with pytest.raises(ValidationError, match="unknown edge"):
        ic.parse_snapshot('{"timestamp": "t", "weights": [{"from": 1, "to": 9, "w": 1.0}]}', net)


# --- constraints -------------------------------------------------------------


def test_constraints_overlapping_groups_rejected():
    with pytest.raises(ValidationError, match="overlap"):
        ic.ConstraintSet(coherent_groups=(frozenset({1, 2}), frozenset({2, 3})))


def test_constraints_bus_must_host_generator_or_terminal(ieee39):
    net, _ = ieee39
    cs = ic.ConstraintSet(coherent_groups=(frozenset({30, 5}),))
    with pytest.raises(ValidationError, match="hosts neither"):
        cs.validate_against(net)


def test_constraints_parse(ieee39):
    net, _ = ieee39
    cs = ic.parse_constraints(
        '{"coherent_groups": [[30, 39], [37, 38]], "vsc_pairs": [[4, 14]]}', net
    )
    assert cs.group_count == 2
    assert cs.vsc_pairs == ((4, 14),)


def test_constraints_pair_arity(ieee39):
    with pytest.raises(ParseError, match="exactly two"):
        ic.parse_constraints('{"vsc_pairs": [[4, 14, 15]]}', ieee39[0])
