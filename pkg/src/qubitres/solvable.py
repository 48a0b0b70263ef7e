"""Exactly solvable energy-conserving model and its resonance approximation.

With only energy-conserving couplings (``lambda = mu = 0``, equal kappa and
nu on both qubits) the reduced dynamics is a Hadamard product

    [rho_t]_{mn} = [rho_0]_{mn} exp(-i t (E_m - E_n))
                   exp(i kappa^2 a_mn S(t)) exp(-(kappa^2 b_mn + nu^2 c_mn) Gamma(t))

with the memory functions

    S(t)     = 1/2 int |f(k)|^2 (|k| t - sin |k| t) / |k|^2 d^3k,
    Gamma(t) = int |f(k)|^2 coth(beta |k|/2) sin^2(|k| t/2) / |k|^2 d^3k.

The resonance approximation replaces ``S(t) -> r_f t/2`` and
``Gamma(t) -> sigma_f(0) t/4``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .density import DensityMatrix4
from .spectral import EPSREL, DivergenceError, FormFactor, SpectralData
from .system import SystemParams, hamiltonian_eigenvalues

__all__ = [
    "A_MN",
    "B_MN",
    "C_MN",
    "MemoryFunctions",
    "QuadratureError",
    "memory_functions",
    "exact_evolve",
    "resonance_evolve_ec",
    "deviation",
]

A_MN = np.array([[0, -4, -4, 0], [4, 0, 0, 4], [4, 0, 0, 4], [0, -4, -4, 0]], dtype=float)
B_MN = np.array([[0, 4, 4, 16], [4, 0, 0, 4], [4, 0, 0, 4], [16, 4, 4, 0]], dtype=float)
C_MN = np.array([[0, 4, 4, 8], [4, 0, 8, 4], [4, 8, 0, 4], [8, 4, 4, 0]], dtype=float)


class QuadratureError(RuntimeError):
    """Adaptive quadrature of a memory function did not converge."""


def _quad(func, a, b, t, epsabs=0.0, **kw):
    # purely relative accuracy by default: S and Gamma are tiny at small t
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(func, a, b, epsabs=epsabs, epsrel=EPSREL, **kw)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"memory function quadrature failed at t={t}: {exc}") from None
    return val


def _radial(f: FormFactor):
    # int_{S^2} |f(r, .)|^2, the r^2 of d^3k cancels the 1/|k|^2
    if f.m is None:
        raise DivergenceError("memory functions need an exponential cutoff (m is None)")
    w, p, m = f.angular_weight, f.p, f.m
    return lambda r: w * r ** (2.0 * p) * math.exp(-2.0 * r**m)


def _support(f: FormFactor) -> float:
    """Radius beyond which exp(-2 r^m) < 1e-36; the oscillatory tail is cut there."""
    return (42.0) ** (1.0 / f.m)


def _x_minus_sin(x: float) -> float:
    if x < 1e-2:
        x2 = x * x
        return x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    return x - math.sin(x)


def _S(t: float, f: FormFactor) -> float:
    """Direct quadrature for t <= 1; otherwise split at r = 1/t and integrate the
    tail ``int rad sin(rt)`` with a Fourier-weighted rule."""
    if t == 0.0:
        return 0.0
    rad = _radial(f)
    if t <= 1.0:
        return 0.5 * _quad(lambda r: rad(r) * _x_minus_sin(r * t), 0.0, np.inf, t, limit=200)
    lin = t * _quad(lambda r: rad(r) * r, 0.0, np.inf, t, limit=200)
    c = 1.0 / t
    # (rt - sin rt) on [0, c] is evaluated as one piece to avoid cancellation
    near = _quad(lambda r: rad(r) * _x_minus_sin(r * t), 0.0, c, t, limit=200)
    lin_near = t * _quad(lambda r: rad(r) * r, 0.0, c, t, limit=200)
    R = max(_support(f), 2.0 * c)
    tail_sin = _quad(rad, c, R, t, weight="sin", wvar=t, limit=400)
    return 0.5 * (near + (lin - lin_near) - tail_sin)


def _Gamma(t: float, f: FormFactor, beta: float) -> float:
    if t == 0.0:
        return 0.0
    rad = _radial(f)

    def h(r):
        return rad(r) / math.tanh(0.5 * beta * r)

    c = 1.0 / t
    near = _quad(lambda r: h(r) * math.sin(0.5 * r * t) ** 2, 0.0, c, t, limit=200)
    # sin^2(x/2) = (1 - cos x)/2
    R = max(_support(f), 2.0 * c)
    far = 0.5 * (_quad(h, c, np.inf, t, limit=200)
                 - _quad(h, c, R, t, weight="cos", wvar=t, limit=400))
    return near + far


def memory_functions(f: FormFactor, beta: float, t: float) -> tuple[float, float]:
    """``(S(t), Gamma(t))`` by adaptive quadrature."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if beta <= 0:
        raise ValueError("beta must be positive")
    return _S(float(t), f), _Gamma(float(t), f, beta)


@dataclass(frozen=True)
class MemoryFunctions:
    """Memoized ``S`` and ``Gamma`` for one form factor and temperature."""

    f: FormFactor
    beta: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        _radial(self.f)
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def __call__(self, t: float) -> tuple[float, float]:
        t = float(t)
        hit = self._cache.get(t)
        if hit is None:
            hit = memory_functions(self.f, self.beta, t)
            self._cache[t] = hit
        return hit

    def S(self, t: float) -> float:
        return self(t)[0]

    def Gamma(self, t: float) -> float:
        return self(t)[1]

    def on_grid(self, ts) -> tuple[np.ndarray, np.ndarray]:
        vals = np.array([self(t) for t in np.asarray(ts, dtype=float).ravel()])
        return vals[:, 0], vals[:, 1]


def _bohr_phases(t: float, sys: SystemParams | None) -> np.ndarray:
    if sys is None:
        return np.ones((4, 4), dtype=complex)
    E = np.asarray(hamiltonian_eigenvalues(sys))
    return np.exp(-1j * t * (E[:, None] - E[None, :]))


def _factor(t, S, G, kappa, nu, sys):
    k2, n2 = kappa * kappa, nu * nu
    return _bohr_phases(t, sys) * np.exp(1j * k2 * A_MN * S - (k2 * B_MN + n2 * C_MN) * G)


def exact_evolve(rho0, t: float, kappa: float, nu: float, mf: MemoryFunctions,
                 sys: SystemParams | None = None) -> DensityMatrix4:
    """Exact state at time ``t``.  Without ``sys`` the free phases are omitted."""
    if t < 0:
        raise ValueError("t must be non-negative")
    S, G = mf(t)
    r0 = np.asarray(rho0, dtype=complex)
    return DensityMatrix4(r0 * _factor(t, S, G, kappa, nu, sys))


def resonance_evolve_ec(rho0, t: float, kappa: float, nu: float, sd: SpectralData,
                        sys: SystemParams | None = None,
                        l4_as_printed: bool = False) -> DensityMatrix4:
    """Resonance approximation of the energy-conserving model.

    Element by element:

    * populations are frozen,
    * ``(1,n)``, ``n = 2, 3``: phase ``exp(-2 i t kappa^2 r_f)``, decay ``(kappa^2+nu^2) sigma_f(0)``,
    * ``(1,4)``: decay ``(4 kappa^2 + 2 nu^2) sigma_f(0)``,
    * ``(2,3)``: decay ``2 nu^2 sigma_f(0)``,
    * ``(m,4)``, ``m = 2, 3``: phase ``exp(+2 i t kappa^2 r_f)``, decay ``(kappa^2+nu^2) sigma_f(0)``,

    lower elements by conjugation.  ``l4_as_printed=True`` uses
    ``2 kappa^2 sigma_f(0)`` for the (2,3) decay instead; that variant does
    not follow from the exact solution (``b_23 = 0``, ``c_23 = 8``).
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    k2, n2 = kappa * kappa, nu * nu
    s0, r = sd.sigma_f_0, sd.r_f
    side = np.exp(-t * (k2 + n2) * s0)
    f = np.ones((4, 4), dtype=complex)
    f[0, 1] = f[0, 2] = np.exp(-2j * t * k2 * r) * side
    f[0, 3] = np.exp(-t * (4 * k2 + 2 * n2) * s0)
    f[1, 2] = np.exp(-2 * t * (k2 if l4_as_printed else n2) * s0)
    f[1, 3] = f[2, 3] = np.exp(2j * t * k2 * r) * side
    iu = np.triu_indices(4, 1)
    f[iu[1], iu[0]] = f[iu].conj()
    r0 = np.asarray(rho0, dtype=complex)
    return DensityMatrix4(r0 * f * _bohr_phases(t, sys), approximate=True)


def deviation(rho0, t_grid, kappa: float, nu: float, mf: MemoryFunctions,
              sd: SpectralData) -> float:
    """``max_t max_{mn} |exact - resonance|`` over ``t_grid``.

    The free phases multiply both states equally and drop out of the modulus.
    """
    r0 = np.asarray(rho0, dtype=complex)
    worst = 0.0
    for t in np.asarray(t_grid, dtype=float):
        a = exact_evolve(r0, t, kappa, nu, mf).data
        b = resonance_evolve_ec(r0, t, kappa, nu, sd).data
        worst = max(worst, float(np.abs(a - b).max()))
    return worst

