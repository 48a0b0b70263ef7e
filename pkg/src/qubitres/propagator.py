"""Resonance-approximation propagator for two qubits.

The reduced density matrix evolves cluster by cluster.  Writing
``[rho_t]_{mn} = sum_{(k,l)} A_t(m,n;k,l) [rho_0]_{kl}``, the amplitudes of
every cluster form a semigroup ``A_{t+s} = A_t A_s`` with generator
``G_C``.  Five clusters occur for ``0 < B1 < B2``, ``B2 != 2 B1``:

* populations ``{(1,1),...,(4,4)}``, a product of two independent
  single-qubit relaxation processes,
* ``{(3,1),(4,2)}`` (qubit 1 coherences) and ``{(2,1),(4,3)}`` (qubit 2
  coherences), each a coupled 2x2 block,
* the singletons ``{(3,2)}`` and ``{(4,1)}``.

Only elements on one side of the diagonal are propagated; the rest follow
by complex conjugation.  Phases follow ``[rho_t]_{mn} ~ exp(i t eps)``
with ``eps`` the resonance energy attached to ``E_n - E_m``, so every
``eps`` contains its Bohr frequency.
"""
from __future__ import annotations

import cmath
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .density import DensityMatrix4, hermitize_from_lower
from .rates import CouplingSet
from .spectral import SpectralData
from .system import Cluster, SystemParams, cluster_partition, hamiltonian_eigenvalues, partition_function

__all__ = [
    "DensityMatrix4",
    "ResonanceData",
    "ConditionFWarning",
    "resonance_data",
    "evolve",
    "evolve_grid",
    "amplitude",
    "cluster_generator",
    "DEGENERATE_B_TOL",
]

#: below this |B| the 2x2 blocks are treated as decoupled
DEGENERATE_B_TOL = 1e-14
#: relative root separation below which condition (F) counts as violated
SPLIT_TOL = 1e-12


class ConditionFWarning(UserWarning):
    """The two resonances of a 2x2 cluster coincide (incomplete splitting)."""


@dataclass(frozen=True)
class _Block:
    """Data of one coupled 2x2 cluster ``(x, z)``.

    ``x`` is the element with the lower qubit in ``|->`` on the row index
    only (``(3,1)`` or ``(2,1)``), ``z`` its partner (``(4,2)`` or ``(4,3)``).
    The generator acting on ``(x, z)`` is ``i N`` with

        N = bohr + [[A + C + e B, -B], [-e B, A - C + B]].
    """

    bohr: float
    A: complex
    B: complex
    C: complex
    e: float
    eps: tuple[complex, complex]
    y: tuple[complex, complex] | None

    @property
    def degenerate(self) -> bool:
        return self.y is None

    @property
    def split(self) -> bool:
        a, b = self.eps
        return abs(a - b) > SPLIT_TOL * max(1.0, abs(a), abs(b))

    def level_shift_matrix(self) -> np.ndarray:
        A, B, C, e = self.A, self.B, self.C, self.e
        return self.bohr * np.eye(2) + np.array(
            [[A + C + e * B, -B], [-e * B, A - C + B]], dtype=complex)

    def amplitudes(self, t: np.ndarray) -> np.ndarray:
        """``A_t`` for the pair ``(x, z)``, shape ``(len(t), 2, 2)``."""
        t = np.asarray(t, dtype=float)
        if self.y is None:
            d = np.diag(self.level_shift_matrix())
            out = np.zeros(t.shape + (2, 2), dtype=complex)
            out[..., 0, 0] = np.exp(1j * t * d[0])
            out[..., 1, 1] = np.exp(1j * t * d[1])
            return out
        if not self.split:
            # coalescing roots: the spectral projectors blow up, use expm
            N = 1j * self.level_shift_matrix()
            return np.array([expm(tt * N) for tt in t.ravel()]).reshape(t.shape + (2, 2))
        out = np.zeros(t.shape + (2, 2), dtype=complex)
        e = self.e
        for eps, y in zip(self.eps, self.y):
            ph = np.exp(1j * t * eps)[..., None, None]
            proj = np.array([[1.0, y], [e * y, e * y * y]]) / (1.0 + e * y * y)
            out = out + ph * proj
        return out


def _block(bohr: float, A: complex, B: complex, C: complex, e: float) -> _Block:
    """Roots and mixing coefficients of one 2x2 cluster.

    ``eps_k = A + B(1+e)/2 - (-1)^k sqrt(D)/2`` with
    ``D = B^2 (1+e)^2 + 4 C (B (e-1) + C)`` on the principal branch, and
    ``y_k = 1 + (A + C - eps_k)/(e B)``.  The two ``y`` satisfy
    ``y_1 y_2 = -1/e``; the smaller one is obtained from that identity to
    avoid cancellation when ``|B|`` is tiny.
    """
    sq = cmath.sqrt(B * B * (1 + e) ** 2 + 4 * C * (B * (e - 1) + C))
    base = A + 0.5 * B * (1 + e)
    eps_rel = (base + 0.5 * sq, base - 0.5 * sq)
    eps = (bohr + eps_rel[0], bohr + eps_rel[1])
    if abs(B) < DEGENERATE_B_TOL:
        return _Block(bohr, A, B, C, e, eps, None)
    y_direct = [1.0 + (A + C - er) / (e * B) for er in eps_rel]
    big = int(np.argmax([abs(v) for v in y_direct]))
    y = [0j, 0j]
    y[big] = y_direct[big]
    y[1 - big] = -1.0 / (e * y_direct[big])
    return _Block(bohr, A, B, C, e, eps, (y[0], y[1]))


@dataclass(frozen=True)
class ResonanceData:
    """Resonance energies, mixing coefficients and population rates.

    ``eps_2B1_k`` belong to the cluster ``{(3,1),(4,2)}``, ``eps_2B2_k`` to
    ``{(2,1),(4,3)}``, ``eps_minus`` to ``(3,2)`` and ``eps_plus`` to
    ``(4,1)``.  ``y_*`` are ``None`` in the decoupled case ``B = 0``.
    """

    eps_2B1_1: complex
    eps_2B1_2: complex
    eps_2B2_1: complex
    eps_2B2_2: complex
    eps_minus: complex
    eps_plus: complex
    y_plus: complex | None
    y_minus: complex | None
    yp_plus: complex | None
    yp_minus: complex | None
    delta2: float
    delta3: float
    delta4: float
    e1: float
    e2: float
    Z: float
    sys: SystemParams
    block1: _Block
    block2: _Block
    kappa_max: float = 0.0

    @property
    def degenerate(self) -> bool:
        return self.block1.degenerate or self.block2.degenerate

    def resonance_energies(self) -> dict[str, complex]:
        return {
            "eps_2B1_1": self.eps_2B1_1, "eps_2B1_2": self.eps_2B1_2,
            "eps_2B2_1": self.eps_2B2_1, "eps_2B2_2": self.eps_2B2_2,
            "eps_minus": self.eps_minus, "eps_plus": self.eps_plus,
        }

    def condition_f(self) -> bool:
        """True if both 2x2 clusters split completely."""
        return self.block1.split and self.block2.split


def resonance_data(c: CouplingSet, sd: SpectralData, sys: SystemParams) -> ResonanceData:
    """Evaluate all resonance energies for symmetric couplings.

    Raises ``ValueError`` for non-symmetric couplings.  A violated
    complete-splitting condition only issues :class:`ConditionFWarning`.
    """
    if not c.is_symmetric:
        raise ValueError("the propagator needs lambda1=lambda2, mu1=mu2, kappa1=kappa2, nu1=nu2")
    ex = c.exchange(1)  # lambda^2 + mu^2
    k2 = c.kappa1**2
    n2 = c.nu1**2
    e1, e2 = sys.e1, sys.e2
    s0 = sd.sigma_f_0
    C = -2.0 * k2 * sd.r_f

    A1 = 1j * ex * 0.5 * sd.sigma_g_B1 + 1j * (k2 + n2) * s0 - ex * sd.r_g_B1
    B1_ = 1j * ex * sd.sigma_g_minus_B2
    blk1 = _block(2.0 * sys.B1, A1, B1_, C, e2)

    A2 = 1j * ex * 0.5 * sd.sigma_g_B2 + 1j * (k2 + n2) * s0 - ex * sd.r_g_B2
    B2_ = 1j * ex * sd.sigma_g_minus_B1
    blk2 = _block(2.0 * sys.B2, A2, B2_, C, e1)

    sg = sd.sigma_g_B1 + sd.sigma_g_B2
    eps_minus = (2.0 * (sys.B1 - sys.B2) + 1j * ex * sg + 2j * n2 * s0
                 + ex * (sd.r_g_B1 - sd.r_g_B2))
    eps_plus = (2.0 * (sys.B1 + sys.B2) + 1j * ex * sg + 4j * k2 * s0 + 2j * n2 * s0
                - ex * (sd.r_g_B1 + sd.r_g_B2))

    d2 = ex * sd.sigma_g_B2
    d3 = ex * sd.sigma_g_B1
    y1 = blk1.y or (None, None)
    y2 = blk2.y or (None, None)
    rd = ResonanceData(
        eps_2B1_1=blk1.eps[0], eps_2B1_2=blk1.eps[1],
        eps_2B2_1=blk2.eps[0], eps_2B2_2=blk2.eps[1],
        eps_minus=eps_minus, eps_plus=eps_plus,
        y_plus=y1[0], y_minus=y1[1], yp_plus=y2[0], yp_minus=y2[1],
        delta2=d2, delta3=d3, delta4=d2 + d3,
        e1=e1, e2=e2, Z=partition_function(sys), sys=sys,
        block1=blk1, block2=blk2, kappa_max=c.kappa_max,
    )
    if not rd.degenerate and not rd.condition_f():
        warnings.warn("resonances of a 2x2 cluster coincide; condition (F) fails",
                      ConditionFWarning, stacklevel=2)
    return rd


# ---------------------------------------------------------------- populations

def _qubit_transition(t: np.ndarray, delta: float, e: float) -> np.ndarray:
    """Single-qubit population propagator ``P[s, s']`` in the order (+, -).

    ``P = pi 1^T + exp(-t delta) (I - pi 1^T)`` with the Gibbs vector
    ``pi = (1, e)/(1 + e)``.
    """
    pi = np.array([1.0, e]) / (1.0 + e)
    stat = np.outer(pi, np.ones(2))
    decay = np.exp(-np.asarray(t, dtype=float) * delta)[..., None, None]
    return stat + decay * (np.eye(2) - stat)


def _population_transition(t, rd: ResonanceData) -> np.ndarray:
    """4x4 population propagator, shape ``(len(t), 4, 4)``.

    Qubit 1 relaxes at ``delta3`` (it sees sigma_g(B1)), qubit 2 at
    ``delta2``.  The 4x4 matrix is the Kronecker product of the two.
    """
    p1 = _qubit_transition(t, rd.delta3, rd.e1)
    p2 = _qubit_transition(t, rd.delta2, rd.e2)
    return np.einsum("...ik,...jl->...ijkl", p1, p2).reshape(p1.shape[:-2] + (4, 4))


def _population_generator(rd: ResonanceData) -> np.ndarray:
    def q(delta, e):
        pi = np.array([1.0, e]) / (1.0 + e)
        return -delta * (np.eye(2) - np.outer(pi, np.ones(2)))
    return np.kron(q(rd.delta3, rd.e1), np.eye(2)) + np.kron(np.eye(2), q(rd.delta2, rd.e2))


# -------------------------------------------------------------------- evolve

# lower-triangle elements that are propagated, 0-based
_BLOCK1 = ((2, 0), (3, 1))
_BLOCK2 = ((1, 0), (3, 2))


def evolve_grid(rho0, ts, rd: ResonanceData) -> np.ndarray:
    """Propagate ``rho0`` to every time in ``ts``; returns shape ``(len(ts), 4, 4)``."""
    r0 = np.asarray(rho0, dtype=complex)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0):
        raise ValueError("times must be non-negative")
    out = np.zeros(ts.shape + (4, 4), dtype=complex)

    P = _population_transition(ts, rd)
    idx = np.arange(4)
    out[:, idx, idx] = np.einsum("tij,j->ti", P, r0[idx, idx].real)

    for blk, pairs in ((rd.block1, _BLOCK1), (rd.block2, _BLOCK2)):
        At = blk.amplitudes(ts)
        v0 = np.array([r0[p] for p in pairs])
        v = np.einsum("tij,j->ti", At, v0)
        for j, p in enumerate(pairs):
            out[:, p[0], p[1]] = v[:, j]

    out[:, 2, 1] = np.exp(1j * ts * rd.eps_minus) * r0[2, 1]
    out[:, 3, 0] = np.exp(1j * ts * rd.eps_plus) * r0[3, 0]
    return hermitize_from_lower(out)


def evolve(rho0, t: float, rd: ResonanceData) -> DensityMatrix4:
    """``rho_t`` in the resonance approximation (flagged approximate)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    data = evolve_grid(rho0, [t], rd)[0]
    return DensityMatrix4(data, approximate=True)


# ------------------------------------------------------- amplitudes/generator

def _lower(m: int, n: int) -> tuple[tuple[int, int], bool]:
    return ((m, n), False) if m >= n else ((n, m), True)


def amplitude(t: float, m: int, n: int, k: int, l: int, rd: ResonanceData) -> complex:
    """``A_t(m,n;k,l)`` with 1-based indices; zero across clusters."""
    (mm, nn), cm = _lower(m, n)
    (kk, ll), ck = _lower(k, l)
    if cm != ck:
        return 0j
    a = _lower_amplitude(t, (mm - 1, nn - 1), (kk - 1, ll - 1), rd)
    return a.conjugate() if cm else a


def _lower_amplitude(t, p, q, rd: ResonanceData) -> complex:
    if p[0] == p[1] and q[0] == q[1]:
        return complex(_population_transition(np.array([t]), rd)[0, p[0], q[0]])
    for blk, pairs in ((rd.block1, _BLOCK1), (rd.block2, _BLOCK2)):
        if p in pairs and q in pairs:
            return complex(blk.amplitudes(np.array([t]))[0, pairs.index(p), pairs.index(q)])
    if p == q == (2, 1):
        return complex(np.exp(1j * t * rd.eps_minus))
    if p == q == (3, 0):
        return complex(np.exp(1j * t * rd.eps_plus))
    return 0j


def cluster_generator(cluster: Cluster, rd: ResonanceData) -> np.ndarray:
    """Generator ``G_C`` with ``A_C(t) = expm(t G_C)`` in the order of ``cluster.pairs``.

    The pairs must all lie on the diagonal, all below it or all above it
    (which is how :func:`qubitres.system.cluster_partition` groups them).
    """
    pairs = [(m - 1, n - 1) for m, n in cluster.pairs]
    K = len(pairs)
    if K == 0:
        raise ValueError("empty cluster")
    if all(m == n for m, n in pairs):
        Q = _population_generator(rd)
        ix = [m for m, _ in pairs]
        return Q[np.ix_(ix, ix)].astype(complex)
    upper = all(m < n for m, n in pairs)
    if not upper and not all(m > n for m, n in pairs):
        raise ValueError("cluster mixes pairs above and below the diagonal")
    low = [(n, m) if upper else (m, n) for m, n in pairs]
    G = np.zeros((K, K), dtype=complex)
    for blk, bpairs in ((rd.block1, _BLOCK1), (rd.block2, _BLOCK2)):
        if set(low) <= set(bpairs):
            N = 1j * blk.level_shift_matrix()
            ix = [bpairs.index(p) for p in low]
            G = N[np.ix_(ix, ix)]
            break
    else:
        singles = {(2, 1): rd.eps_minus, (3, 0): rd.eps_plus}
        if K != 1 or low[0] not in singles:
            raise ValueError(f"pairs {cluster.pairs} do not form a cluster")
        G[0, 0] = 1j * singles[low[0]]
    return G.conj() if upper else G


def generator_expm(cluster: Cluster, t: float, rd: ResonanceData) -> np.ndarray:
    """``expm(t G_C)``; an independent route to the cluster amplitudes."""
    return expm(t * cluster_generator(cluster, rd))


def clusters(rd: ResonanceData):
    """Cluster partition of the system the data was built for."""
    return cluster_partition(hamiltonian_eigenvalues(rd.sys))
