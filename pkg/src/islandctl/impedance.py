"""Bus admittance/impedance matrices and electrical distance.

The electrical distance between buses i and j is the magnitude of the two-port
input impedance seen between them, |Z_ii + Z_jj - 2 Z_ij|, with Z the inverse
of the AC admittance matrix. A uniform ground shunt keeps Y invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistanceError, SingularMatrixError, ValidationError
from .model import BusIndex, Network

DISTANCE_FLOOR = 1e-9
CONDITION_LIMIT = 1e12


def build_ybus(network: Network) -> np.ndarray:
    """Assemble the complex AC admittance matrix.

    Off-diagonals are the negated series admittances (parallel circuits summed);
    diagonals collect incident series admittances plus per-bus shunts plus the
    uniform ground shunt epsilon. DC-link branches are excluded.
    """
    index = network.bus_index
    n = len(index)
    y = np.zeros((n, n), dtype=complex)
    for br in network.branches:
        if br.kind != "ac-line":
            continue
        if abs(br.impedance) == 0.0:
            raise ValidationError(f"branch {br.key}: zero-impedance ac-line")
        adm = 1.0 / br.impedance
        i = index.index_of(br.from_bus)
        j = index.index_of(br.to_bus)
        y[i, j] -= adm
        y[j, i] -= adm
        y[i, i] += adm
        y[j, j] += adm
    for b in network.buses:
        i = index.index_of(b.id)
        y[i, i] += complex(b.g_shunt, b.b_shunt) + network.ground_shunt_epsilon
    return y


@dataclass(frozen=True)
class ImpedanceMatrix:
    """Dense bus impedance matrix Z = Y^-1 with its bus indexing."""

    z: np.ndarray
    index: BusIndex

    def __post_init__(self):
        if not np.all(np.isfinite(self.z.real)) or not np.all(np.isfinite(self.z.imag)):
            raise SingularMatrixError("impedance matrix has non-finite entries")


def build_zbus(ybus: np.ndarray, index: BusIndex) -> ImpedanceMatrix:
    """Invert the admittance matrix, rejecting near-singular inputs."""
    cond = np.linalg.cond(ybus)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMatrixError(
            f"Y-bus is singular or near-singular (condition estimate {cond:.3e}); "
            "increase ground_shunt_epsilon to regularize"
        )
    z = np.linalg.inv(ybus)
    z = 0.5 * (z + z.T)  # Y is symmetric; enforce exact symmetry of the inverse
    return ImpedanceMatrix(z=z, index=index)


def electrical_distance(zbus: ImpedanceMatrix, i: int, j: int) -> float:
    """|Z_ii + Z_jj - 2 Z_ij| between two distinct buses (by id)."""
    if i == j:
        raise ValidationError(f"electrical distance undefined for a self-pair ({i}, {i})")
    a = zbus.index.index_of(i)
    b = zbus.index.index_of(j)
    d = abs(zbus.z[a, a] + zbus.z[b, b] - 2.0 * zbus.z[a, b])
    if d < DISTANCE_FLOOR:
        raise DegenerateDistanceError(
            f"electrical distance between buses {i} and {j} is {d:.3e}, "
            f"below the degeneracy floor {DISTANCE_FLOOR:.0e}"
        )
    return d


def distance_matrix(zbus: ImpedanceMatrix) -> np.ndarray:
    """Full pairwise distance matrix (zero diagonal by convention)."""
    n = len(zbus.index)
    dz = np.diag(zbus.z)
    d = np.abs(dz[:, None] + dz[None, :] - 2.0 * zbus.z)
    np.fill_diagonal(d, 0.0)
    off = d[~np.eye(n, dtype=bool)]
    if off.size and off.min() < DISTANCE_FLOOR:
        i, j = np.unravel_index(np.argmin(d + np.eye(n) * np.inf), d.shape)
        raise DegenerateDistanceError(
            f"electrical distance between buses {zbus.index.id_of(i)} and "
            f"{zbus.index.id_of(j)} is below the degeneracy floor"
        )
    return d
