"""Two-qubit system parameters, Bohr spectrum and cluster partition.

Basis ordering is fixed everywhere in the package as

    Phi_1 = |++>,  Phi_2 = |+->,  Phi_3 = |-+>,  Phi_4 = |-->

with S^z|+> = |+>.  Index pairs are 1-based, as in the physics notation.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SystemParams",
    "Cluster",
    "ClusterPartition",
    "hamiltonian_eigenvalues",
    "liouville_spectrum",
    "cluster_partition",
    "gibbs_populations",
    "partition_function",
]

#: absolute tolerance used to decide equality of energy differences
ENERGY_TOL = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless fields ``B1 < B2`` and inverse temperature ``beta``."""

    B1: float
    B2: float
    beta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.B1 < self.B2):
            raise ValueError(f"need 0 < B1 < B2, got B1={self.B1}, B2={self.B2}")
        if abs(self.B2 - 2.0 * self.B1) <= ENERGY_TOL:
            raise ValueError("B2 = 2*B1 makes the Bohr spectrum degenerate")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def e1(self) -> float:
        """Gibbs factor exp(2 beta B1)."""
        return float(np.exp(2.0 * self.beta * self.B1))

    @property
    def e2(self) -> float:
        return float(np.exp(2.0 * self.beta * self.B2))


def hamiltonian_eigenvalues(sys: SystemParams) -> tuple[float, float, float, float]:
    """Eigenvalues of B1 S1^z + B2 S2^z in the order Phi_1..Phi_4."""
    B1, B2 = sys.B1, sys.B2
    return (B1 + B2, B1 - B2, -B1 + B2, -B1 - B2)


def partition_function(sys: SystemParams) -> float:
    E = np.asarray(hamiltonian_eigenvalues(sys))
    return float(np.exp(-sys.beta * E).sum())


def gibbs_populations(sys: SystemParams) -> np.ndarray:
    """Equilibrium weights exp(-beta E_m)/Z."""
    E = np.asarray(hamiltonian_eigenvalues(sys))
    w = np.exp(-sys.beta * (E - E.min()))
    return w / w.sum()


def liouville_spectrum(sys: SystemParams) -> dict[float, int]:
    """Eigenvalues of L_S = H_S x 1 - 1 x H_S with multiplicities.

    Both signs are included; the non-negative part is
    ``{0: 4, 2B1: 2, 2B2: 2, 2(B2-B1): 1, 2(B1+B2): 1}``.
    """
    spec: dict[float, int] = {}
    for c in cluster_partition(hamiltonian_eigenvalues(sys)).clusters:
        spec[c.energy] = len(c.pairs)
    return spec


@dataclass(frozen=True)
class Cluster:
    """Index pairs (k, l) sharing the Bohr energy ``E_k - E_l``."""

    energy: float
    pairs: tuple[tuple[int, int], ...]

    @property
    def multiplicity(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs


@dataclass(frozen=True)
class ClusterPartition:
    clusters: tuple[Cluster, ...]
    n_levels: int = field(default=4)

    def cluster_of(self, m: int, n: int) -> Cluster:
        for c in self.clusters:
            if (m, n) in c.pairs:
                return c
        raise KeyError((m, n))

    def upper(self) -> tuple[Cluster, ...]:
        """Clusters restricted to pairs on or above the diagonal (empty ones dropped)."""
        out = []
        for c in self.clusters:
            pairs = tuple(p for p in c.pairs if p[0] <= p[1])
            if pairs:
                out.append(Cluster(c.energy, pairs))
        return tuple(out)


def cluster_partition(energies, tol: float = ENERGY_TOL) -> ClusterPartition:
    """Group all index pairs (k, l) by the difference ``E_k - E_l``.

    Works for any number of levels N >= 2.  Differences closer than ``tol``
    are treated as equal.  Clusters are sorted by energy, pairs within a
    cluster lexicographically.
    """
    E = [float(e) for e in energies]
    n = len(E)
    if n < 2:
        raise ValueError("need at least two energy levels")
    keys: list[float] = []
    groups: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for k in range(n):
        for l in range(n):
            d = E[k] - E[l]
            for i, ref in enumerate(keys):
                if abs(d - ref) <= tol:
                    break
            else:
                keys.append(d)
                i = len(keys) - 1
            groups[i].append((k + 1, l + 1))
    clusters = []
    for i, ref in enumerate(keys):
        # the zero cluster gets an exact 0.0 label
        label = 0.0 if abs(ref) <= tol else ref
        clusters.append(Cluster(label, tuple(sorted(groups[i]))))
    clusters.sort(key=lambda c: c.energy)
    return ClusterPartition(tuple(clusters), n)
