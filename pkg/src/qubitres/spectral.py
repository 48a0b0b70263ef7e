"""Reservoir spectral functions, principal-value integrals and parameter reduction.

Form factors are ``h(r, Sigma) = r**p * exp(-r**m) * h1(Sigma)``; only the
angular integral ``angular_weight = int |h1|^2 dSigma`` enters any quantity
used here, so a :class:`FormFactor` carries that number instead of ``h1``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .system import SystemParams

__all__ = [
    "FormFactor",
    "SpectralData",
    "ReducedParams",
    "DivergenceError",
    "CutoffError",
    "sigma",
    "sigma_minus",
    "pv_r_g",
    "pv_r_f",
    "ohmic_ratio",
    "fermi_factor",
    "reduce_parameters",
    "DEFAULT_F",
    "DEFAULT_G",
    "DEFAULT_CUTOFF",
]

EPSABS = 1e-10
EPSREL = 1e-8
DEFAULT_CUTOFF = 100.0


class DivergenceError(ValueError):
    """A reservoir integral does not exist for the given form factor."""


class CutoffError(ValueError):
    """The cutoff window does not enclose the pole of a PV integral."""


@dataclass(frozen=True)
class FormFactor:
    """Radial profile ``r**p * exp(-r**m)`` with angular weight.

    ``m=None`` drops the exponential factor (pure power law).  That profile
    is only usable where a finite cutoff is supplied, e.g. in :func:`pv_r_g`.
    """

    p: float
    m: int | None = 2
    angular_weight: float = 1.0

    def __post_init__(self):
        n = self.p + 0.5
        if n < -1e-12 or abs(n - round(n)) > 1e-12:
            raise ValueError(f"p must be -1/2 + n with n = 0, 1, ..., got {self.p}")
        if self.m not in (1, 2, None):
            raise ValueError(f"m must be 1, 2 or None, got {self.m}")
        if not self.angular_weight > 0:
            raise ValueError("angular_weight must be positive")

    @classmethod
    def from_angular(cls, p: float, m: int | None, h1) -> "FormFactor":
        """Build from an angular function ``h1(theta, phi)`` by quadrature over S^2."""
        val, _ = integrate.dblquad(
            lambda th, ph: abs(h1(th, ph)) ** 2 * math.sin(th),
            0.0, 2.0 * math.pi, 0.0, math.pi,
            epsabs=EPSABS, epsrel=EPSREL,
        )
        return cls(p, m, val)

    def abs2(self, r):
        """``int_{S^2} |h(r, Sigma)|^2 dSigma`` for radius ``r > 0``."""
        r = np.asarray(r, dtype=float)
        out = self.angular_weight * r ** (2.0 * self.p)
        if self.m is not None:
            out = out * np.exp(-2.0 * r**self.m)
        return out


#: collective/local energy-conserving form factor (finite sigma_f(0))
DEFAULT_F = FormFactor(p=-0.5, m=2)
#: energy-exchange form factor, g ~ sqrt(r) near the origin
DEFAULT_G = FormFactor(p=0.5, m=2)


def _coth(x):
    return 1.0 / np.tanh(x)


def fermi_factor(x: float, beta: float) -> float:
    """``exp(2 beta x) / (exp(2 beta x) + 1)``, overflow safe."""
    return float(special.expit(2.0 * beta * x))


def sigma(x: float, beta: float, h: FormFactor) -> float:
    """``4 pi x^2 coth(beta x) int |h(2x, Sigma)|^2 dSigma``; analytic limit at x = 0."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if x < 0:
        raise ValueError(f"sigma needs x >= 0, got {x}")
    if x == 0:
        if h.p < -0.5:
            raise DivergenceError("sigma(0) diverges for p < -1/2")
        # x^2 coth(beta x) (2x)^{2p} -> x^{1+2p} / (beta 2^{-2p})
        if abs(h.p + 0.5) < 1e-12:
            return 2.0 * math.pi * h.angular_weight / beta
        return 0.0
    bx = beta * x
    # x / tanh(beta x) without overflow near 0, and x (2x)^{2p} = 2^{2p} x^{1+2p}
    x_coth = 1.0 / beta if bx < 1e-8 else x / math.tanh(bx)
    radial = h.angular_weight * 2.0 ** (2.0 * h.p) * x ** (1.0 + 2.0 * h.p)
    if h.m is not None:
        radial *= math.exp(-2.0 * (2.0 * x) ** h.m)
    return float(4.0 * math.pi * x_coth * radial)


def sigma_minus(x: float, beta: float, g: FormFactor) -> float:
    """``2 pi x^2 e^{beta x} / sinh(beta x) int |g(2x, Sigma)|^2 dSigma`` for x > 0."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if x <= 0:
        raise ValueError(f"sigma_minus needs x > 0, got {x}")
    # e^{bx}/sinh(bx) = 2 / (1 - e^{-2bx})
    ratio = 2.0 / -math.expm1(-2.0 * beta * x)
    return float(2.0 * math.pi * x * x * ratio * g.abs2(2.0 * x))


def _lamb_integrand(beta: float, g: FormFactor):
    """``u^2 |g(|u|)|^2 coth(beta |u| / 2)``, even in u, continuous at 0."""
    def F(u):
        a = abs(u)
        if a == 0.0:
            if abs(g.p + 0.5) < 1e-12:
                return 2.0 * g.angular_weight / beta
            return 0.0
        return float(a * a * g.abs2(a) * _coth(0.5 * beta * a))
    return F


def pv_r_g(x: float, beta: float, g: FormFactor, u_c: float = DEFAULT_CUTOFF) -> float:
    """Lamb-shift integral ``1/2 P.V. int_{-u_c}^{u_c} F(u) / (u - 2x) du``.

    The pole value is subtracted analytically,

        P.V. int F/(u-a) = int [F(u) - F(a)]/(u-a) du + F(a) log((u_c-a)/(u_c+a)),

    and the regular remainder is integrated adaptively with breakpoints at
    the kink u = 0 and the (removable) point u = a.
    """
    if x < 0:
        raise ValueError("pv_r_g needs x >= 0")
    if u_c <= 4.0 * x:
        raise CutoffError(f"cutoff u_c={u_c} must exceed 4x={4.0 * x}")
    if x == 0:
        return 0.0
    a = 2.0 * x
    F = _lamb_integrand(beta, g)
    Fa = F(a)

    def regular(u):
        d = u - a
        if d == 0.0:
            return 0.0
        return (F(u) - Fa) / d

    total = 0.0
    for lo, hi in ((-u_c, 0.0), (0.0, a), (a, u_c)):
        val, _ = integrate.quad(regular, lo, hi, epsabs=EPSABS, epsrel=EPSREL, limit=400)
        total += val
    total += Fa * math.log((u_c - a) / (u_c + a))
    return 0.5 * total


def pv_r_f(f: FormFactor) -> float:
    """``P.V. int_{R^3} |f|^2 / |k| d^3k = w int_0^inf r^{2p+1} e^{-2 r^m} dr``.

    The integrand is positive, so this is an ordinary improper integral.
    """
    if f.m is None:
        raise DivergenceError("r_f diverges without an exponential cutoff (m=None)")
    if 2.0 * f.p + 1.0 <= -1.0:
        raise DivergenceError(f"r_f diverges at the origin for p={f.p}")
    w = f.angular_weight
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                lambda r: r ** (2.0 * f.p + 1.0) * math.exp(-2.0 * r**f.m),
                0.0, np.inf, epsabs=EPSABS, epsrel=EPSREL, limit=400,
            )
        except integrate.IntegrationWarning as exc:
            raise DivergenceError(f"r_f quadrature failed to converge: {exc}") from None
    if not np.isfinite(val) or err > 1e3 * max(EPSABS, EPSREL * abs(val)):
        raise DivergenceError(f"r_f quadrature unreliable (value {val}, error {err})")
    return w * val


def ohmic_ratio(sys: SystemParams) -> float:
    """``sigma_g(B2)/sigma_g(B1) = (B2/B1)^3 coth(beta B2)/coth(beta B1)`` for g ~ sqrt(r)."""
    return (sys.B2 / sys.B1) ** 3 * _coth(sys.beta * sys.B2) / _coth(sys.beta * sys.B1)


@dataclass(frozen=True)
class SpectralData:
    """The eight reservoir numbers entering rates and propagator."""

    sigma_g_B1: float
    sigma_g_B2: float
    sigma_g_minus_B1: float
    sigma_g_minus_B2: float
    r_g_B1: float
    r_g_B2: float
    sigma_f_0: float
    r_f: float
    u_c: float = DEFAULT_CUTOFF

    def __post_init__(self):
        for name in ("sigma_g_B1", "sigma_g_B2", "sigma_f_0"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.u_c <= 0:
            raise ValueError("u_c must be positive")

    def check_fermi_relation(self, sys: SystemParams, rtol: float = 1e-8) -> None:
        """Raise if ``sigma_g^-(B_j) != fermi(B_j) sigma_g(B_j)`` beyond ``rtol``."""
        for B, s, sm in ((sys.B1, self.sigma_g_B1, self.sigma_g_minus_B1),
                         (sys.B2, self.sigma_g_B2, self.sigma_g_minus_B2)):
            want = fermi_factor(B, sys.beta) * s
            if abs(sm - want) > rtol * max(abs(want), 1e-300):
                raise ValueError(f"sigma_g^-({B}) = {sm} inconsistent with {want}")

    @classmethod
    def renormalized(cls, sys: SystemParams) -> "SpectralData":
        """Units with sigma_g(B1) = r_g(B1) = sigma_f(0) = r_f = 1.

        sigma_g(B2) follows the sqrt(r) ratio and r_g(B2) = r_g(B1).
        """
        s2 = ohmic_ratio(sys)
        return cls(
            sigma_g_B1=1.0,
            sigma_g_B2=s2,
            sigma_g_minus_B1=fermi_factor(sys.B1, sys.beta),
            sigma_g_minus_B2=fermi_factor(sys.B2, sys.beta) * s2,
            r_g_B1=1.0,
            r_g_B2=1.0,
            sigma_f_0=1.0,
            r_f=1.0,
        )

    @classmethod
    def from_form_factors(cls, sys: SystemParams, f: FormFactor = DEFAULT_F,
                          g: FormFactor = DEFAULT_G,
                          u_c: float = DEFAULT_CUTOFF) -> "SpectralData":
        """Raw mode: every number computed from the form factors."""
        b = sys.beta
        return cls(
            sigma_g_B1=sigma(sys.B1, b, g),
            sigma_g_B2=sigma(sys.B2, b, g),
            sigma_g_minus_B1=sigma_minus(sys.B1, b, g),
            sigma_g_minus_B2=sigma_minus(sys.B2, b, g),
            r_g_B1=pv_r_g(sys.B1, b, g, u_c),
            r_g_B2=pv_r_g(sys.B2, b, g, u_c),
            sigma_f_0=sigma(0.0, b, f),
            r_f=pv_r_f(f),
            u_c=u_c,
        )


@dataclass(frozen=True)
class ReducedParams:
    """Decay constants alpha1..alpha4 and Lamb shifts beta1..beta3."""

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    beta1: float
    beta2: float
    beta3: float


def reduce_parameters(lam: float, kappa: float, nu: float, sys: SystemParams) -> ReducedParams:
    """Renormalized decay constants and Lamb shifts for lambda = mu.

    With sigma_g(B1) = r_g(B1) = sigma_f(0) = r_f = 1 the exchange couplings
    enter only through lambda^2 + mu^2 = 2 lambda^2.
    """
    a1 = 2.0 * lam * lam
    return ReducedParams(
        alpha1=a1,
        alpha2=a1 * ohmic_ratio(sys),
        alpha3=kappa * kappa,
        alpha4=nu * nu,
        beta1=a1,
        beta2=a1,
        beta3=-kappa * kappa,
    )
