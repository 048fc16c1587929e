"""Y-bus assembly, Z-bus inversion and electrical distances."""

import numpy as np
import pytest

import islandctl as ic
from islandctl.errors import SingularMatrixError, ValidationError
from islandctl.impedance import DISTANCE_FLOOR


def _net(buses, branches, eps=1e-6):
    return ic.Network(
        base_mva=100.0,
        buses=tuple(buses),
        branches=tuple(branches),
        ground_shunt_epsilon=eps,
    )


def zy_relative_residual(z, y):
    """max |Z Y - I| scaled by the factor magnitudes (relative identity error)."""
    n = len(z)
    return np.abs(z @ y - np.eye(n)).max() / max(1.0, np.abs(z).max() * np.abs(y).max())


def test_single_reactive_line_eps_zero():
    # one line r=0, x=0.1: off-diagonal +j10, diagonals -j10
    net = _net([ic.Bus(1), ic.Bus(2)], [ic.Branch(1, 2, 1, r=0.0, x=0.1)], eps=0.0)
    y = ic.build_ybus(net)
    assert y[0, 1] == pytest.approx(10j)
    assert y[0, 0] == pytest.approx(-10j)
    assert np.allclose(y, y.T)


def test_resistive_assembly_with_shunts(twobus):
    # line conductance 10 plus shunts 2 and 1 -> [[12, -10], [-10, 11]]
    net, _ = twobus
    y = ic.build_ybus(net)
    assert np.allclose(y, np.array([[12.0, -10.0], [-10.0, 11.0]]))


def test_zbus_hand_inverted_2x2(twobus):
    net, _ = twobus
    z = ic.build_zbus(ic.build_ybus(net), net.bus_index).z
    expected = np.array([[11.0, 10.0], [10.0, 12.0]]) / 32.0  # adjugate over determinant
    assert np.allclose(z, expected, atol=1e-14)


def test_identity_admittance_gives_identity_impedance():
    y = np.eye(4, dtype=complex)
    z = ic.build_zbus(y, ic.BusIndex([1, 2, 3, 4])).z
    assert np.allclose(z, np.eye(4))


def test_zy_identity_random_network():
    rng = np.random.default_rng(7)
    buses = [ic.Bus(i) for i in range(1, 7)]
    branches = [ic.Branch(i, i + 1, 1, r=rng.uniform(0.01, 0.1), x=rng.uniform(0.05, 0.3))
                for i in range(1, 6)]
    branches.append(ic.Branch(1, 4, 1, r=0.02, x=0.2))
    branches.append(ic.Branch(2, 6, 1, r=0.03, x=0.15))
    net = _net(buses, branches)
    y = ic.build_ybus(net)
    z = ic.build_zbus(y, net.bus_index).z
    assert zy_relative_residual(z, y) < 1e-10


def test_zy_identity_on_fixture_networks(ieee39, xiamen, twobus):
    for net in (ieee39[0], xiamen[0], twobus[0]):
        y = ic.build_ybus(net)
        z = ic.build_zbus(y, net.bus_index).z
        assert zy_relative_residual(z, y) < 1e-10


def test_ybus_symmetric_and_endpoint_order_invariant():
    a = _net([ic.Bus(1), ic.Bus(2), ic.Bus(3)],
             [ic.Branch(1, 2, 1, 0.01, 0.1), ic.Branch(2, 3, 1, 0.02, 0.2)])
    b = _net([ic.Bus(1), ic.Bus(2), ic.Bus(3)],
             [ic.Branch(2, 1, 1, 0.01, 0.1), ic.Branch(3, 2, 1, 0.02, 0.2)])
    ya, yb = ic.build_ybus(a), ic.build_ybus(b)
    assert np.array_equal(ya, ya.T)
    assert np.array_equal(ya, yb)


def test_parallel_circuit_admittances_sum():
    net = _net([ic.Bus(1), ic.Bus(2)],
               [ic.Branch(1, 2, 1, 0.1, 0.0), ic.Branch(1, 2, 2, 0.1, 0.0)], eps=0.0)
    y = ic.build_ybus(net)
    assert y[0, 1] == pytest.approx(-20.0)


def test_dc_branch_excluded_from_ybus():
    net = ic.Network(
        base_mva=100.0,
        buses=(ic.Bus(1), ic.Bus(2), ic.Bus(3)),
        branches=(ic.Branch(1, 2, 1, 0.1, 0.0), ic.Branch(2, 3, 1, 0.1, 0.0),
                  ic.Branch(1, 3, 1, 0.0, 0.5, kind="vsc-dc-link")),
        vsc_links=(ic.VscLink(terminal1=1, terminal2=3),),
        ground_shunt_epsilon=0.0,
    )
    y = ic.build_ybus(net)
    assert y[0, 2] == 0.0  # the dc conductor carries no AC admittance


def test_singular_ybus_error_names_epsilon():
    net = _net([ic.Bus(1), ic.Bus(2)], [ic.Branch(1, 2, 1, r=0.0, x=0.1)], eps=0.0)
    with pytest.raises(SingularMatrixError, match="ground_shunt_epsilon"):
        ic.build_zbus(ic.build_ybus(net), net.bus_index)


def test_electrical_distance_two_bus(twobus):
    net, _ = twobus
    zbus = ic.build_zbus(ic.build_ybus(net), net.bus_index)
    assert ic.electrical_distance(zbus, 1, 2) == pytest.approx(0.09375, abs=1e-12)
    assert ic.electrical_distance(zbus, 2, 1) == pytest.approx(0.09375, abs=1e-12)


def test_electrical_distance_symmetric_everywhere(ieee39):
    net, _ = ieee39
    zbus = ic.build_zbus(ic.build_ybus(net), net.bus_index)
    d = ic.distance_matrix(zbus)
    assert np.allclose(d, d.T)
    off = d[~np.eye(len(d), dtype=bool)]
    assert (off > DISTANCE_FLOOR).all()


def test_distance_grows_along_chain():
    buses = [ic.Bus(i, g_shunt=0.5) for i in range(1, 6)]
    branches = [ic.Branch(i, i + 1, 1, r=0.1, x=0.0) for i in range(1, 5)]
    net = _net(buses, branches, eps=0.0)
    zbus = ic.build_zbus(ic.build_ybus(net), net.bus_index)
    d12 = ic.electrical_distance(zbus, 1, 2)
    d13 = ic.electrical_distance(zbus, 1, 3)
    d15 = ic.electrical_distance(zbus, 1, 5)
    assert d12 < d13 < d15


def test_self_pair_rejected(twobus):
    net, _ = twobus
    zbus = ic.build_zbus(ic.build_ybus(net), net.bus_index)
    with pytest.raises(ValidationError, match="self-pair"):
        ic.electrical_distance(zbus, 1, 1)
