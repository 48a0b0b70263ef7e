"""Lowest-order thermalization and cluster decoherence rates."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .spectral import SpectralData
from .system import SystemParams

__all__ = [
    "CouplingSet",
    "RateSet",
    "lowest_order_rates",
    "spin_boson_rates",
    "cluster_rate",
    "validity_horizon",
]


@dataclass(frozen=True)
class CouplingSet:
    """Exchange (lambda collective, mu local) and conserving (kappa, nu) couplings."""

    lambda1: float = 0.0
    lambda2: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0
    nu1: float = 0.0
    nu2: float = 0.0

    @classmethod
    def symmetric(cls, lam: float = 0.0, mu: float = 0.0, kappa: float = 0.0,
                  nu: float = 0.0) -> "CouplingSet":
        return cls(lam, lam, kappa, kappa, mu, mu, nu, nu)

    @property
    def kappa_max(self) -> float:
        return max(abs(v) for v in self.as_tuple())

    def as_tuple(self) -> tuple[float, ...]:
        return (self.lambda1, self.lambda2, self.kappa1, self.kappa2,
                self.mu1, self.mu2, self.nu1, self.nu2)

    def scaled(self, s: float) -> "CouplingSet":
        return CouplingSet(*(s * v for v in self.as_tuple()))

    @property
    def is_symmetric(self) -> bool:
        return (self.lambda1 == self.lambda2 and self.kappa1 == self.kappa2
                and self.mu1 == self.mu2 and self.nu1 == self.nu2)

    def exchange(self, j: int) -> float:
        """``lambda_j^2 + mu_j^2``."""
        if j == 1:
            return self.lambda1**2 + self.mu1**2
        return self.lambda2**2 + self.mu2**2


@dataclass(frozen=True)
class RateSet:
    gamma_th: float
    gamma2_dec: float
    gamma3_dec: float
    gamma4_dec: float
    gamma5_dec: float
    Y2: float
    Y3: float

    def decoherence(self) -> dict[int, float]:
        """Cluster index -> decoherence rate for the off-diagonal clusters C2..C5."""
        return {2: self.gamma2_dec, 3: self.gamma3_dec,
                4: self.gamma4_dec, 5: self.gamma5_dec}


def _mixing_term(k1k2: float, exch: float, sig: float, r: float, r_prime: float) -> tuple[float, float]:
    """``(Y, exch*sig/2 - Y)`` with ``Y = |Im sqrt(z)|`` on the principal branch.

    The exchange-squared term carries -1/4 so that Y <= exch*sig/2.  The
    difference is returned in a cancellation-free form: with
    ``q = (exch*sig/2)^2`` and ``P = 4 (k1k2 r)^2``,

        q - Y^2 = 2 (k1k2 exch r)^2 (sig^2 - 4 r'^2) / (q + P + |z|)

    which is non-negative because ``2 r' <= sig`` (``r' = sig tanh / pi``).
    """
    z = 4.0 * k1k2**2 * r**2 - 0.25 * exch**2 * sig**2 - 4j * k1k2 * exch * r * r_prime
    Y = abs(cmath.sqrt(z).imag)
    half = 0.5 * exch * sig
    q = half * half
    P = 4.0 * (k1k2 * r) ** 2
    den = (q + P + abs(z)) * (half + Y)
    if den == 0.0:
        return Y, 0.0
    num = 2.0 * (k1k2 * exch * r) ** 2 * (sig * sig - 4.0 * r_prime * r_prime)
    return Y, num / den


def lowest_order_rates(c: CouplingSet, sd: SpectralData, sys: SystemParams) -> RateSet:
    """O(kappa^2) thermalization rate and decoherence rates of clusters C2..C5.

    ``r`` is the collective Lamb integral ``sd.r_f`` and
    ``r_j' = 4 B_j^2 int |g(2 B_j)|^2 = sigma_g(B_j) tanh(beta B_j) / pi``.
    """
    a1 = c.exchange(1) * sd.sigma_g_B1
    a2 = c.exchange(2) * sd.sigma_g_B2
    s0 = sd.sigma_f_0
    r = sd.r_f
    r1p = sd.sigma_g_B1 * math.tanh(sys.beta * sys.B1) / math.pi
    r2p = sd.sigma_g_B2 * math.tanh(sys.beta * sys.B2) / math.pi
    k1k2 = c.kappa1 * c.kappa2
    Y2, rest2 = _mixing_term(k1k2, c.exchange(2), sd.sigma_g_B2, r, r2p)
    Y3, rest3 = _mixing_term(k1k2, c.exchange(1), sd.sigma_g_B1, r, r1p)
    both = a1 + a2
    local = c.nu1**2 + c.nu2**2
    return RateSet(
        gamma_th=min(a1, a2),
        gamma2_dec=0.5 * a1 + rest2 + (c.kappa1**2 + c.nu1**2) * s0,
        gamma3_dec=0.5 * a2 + rest3 + (c.kappa2**2 + c.nu2**2) * s0,
        gamma4_dec=both + ((c.kappa1 - c.kappa2) ** 2 + local) * s0,
        gamma5_dec=both + ((c.kappa1 + c.kappa2) ** 2 + local) * s0,
        Y2=Y2,
        Y3=Y3,
    )


def spin_boson_rates(lam: float, B: float, sd_h: SpectralData, beta: float) -> tuple[float, float]:
    """Single-qubit Bloch-Redfield rates ``(gamma_th, gamma_dec)``.

    Uses ``J(w) = sigma_h(w/2) / coth(beta w/2)``, so
    ``gamma_th = pi/2 lambda^2 coth(beta B) J(2B) = pi/2 lambda^2 sigma_h(B)``
    and ``gamma_dec = gamma_th/2 + pi lambda^2 sigma_h(0)``.  ``sd_h`` supplies
    ``sigma_h(B)`` as ``sigma_g_B1`` and ``sigma_h(0)`` as ``sigma_f_0``.

    These carry explicit factors of pi that the two-qubit rate formulas do
    not; no attempt is made to reconcile the two conventions.
    """
    J2B = sd_h.sigma_g_B1 / (1.0 / math.tanh(beta * B))
    g_th = 0.5 * math.pi * lam * lam * (1.0 / math.tanh(beta * B)) * J2B
    g_dec = 0.5 * g_th + lam * lam * math.pi * sd_h.sigma_f_0
    return g_th, g_dec


def cluster_rate(e: float, resonance_energies, tol: float = 1e-12) -> float:
    """Minimal imaginary part of the resonance energies of one cluster.

    For ``e == 0`` the equilibrium resonance (the one equal to zero) is
    excluded, giving the thermalization rate.
    """
    eps = [complex(z) for z in resonance_energies]
    if not eps:
        raise ValueError("empty list of resonance energies")
    if e == 0:
        i = int(np.argmin([abs(z) for z in eps]))
        if abs(eps[i]) > tol:
            raise ValueError("e = 0 cluster must contain the zero resonance")
        eps = eps[:i] + eps[i + 1:]
        if not eps:
            raise ValueError("no non-equilibrium resonance in the e = 0 cluster")
    return min(z.imag for z in eps)


def validity_horizon(gamma: float, kappa_max: float) -> float:
    """``ln(kappa^-2)/gamma``: time up to which a cluster is resolved above O(kappa^2)."""
    if gamma <= 0 or kappa_max <= 0:
        return math.inf
    return math.log(kappa_max ** -2) / gamma
