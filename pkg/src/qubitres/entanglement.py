"""Concurrence, initial states and disentanglement-time bounds."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from .density import DensityMatrix4
from .rates import CouplingSet
from .spectral import SpectralData

__all__ = [
    "ApproximationArtifactWarning",
    "ApproximationArtifactError",
    "SY_SY",
    "xi_matrix",
    "xi_eigenvalues",
    "concurrence",
    "concurrence_checked",
    "concurrence_series",
    "SuperpositionFamily",
    "BraunProduct",
    "Explicit",
    "InitialState",
    "initial_state",
    "DisentanglementInputs",
    "bound_terms",
    "disentanglement_bounds",
]

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
#: S^y (x) S^y in the basis |++>, |+->, |-+>, |-->
SY_SY = np.kron(_SY, _SY)

IMAG_TOL = 1e-8
DEFAULT_NEG_TOL = 1e-10
ROUNDOFF_FLOOR = 16.0 * np.finfo(float).eps


class ApproximationArtifactWarning(UserWarning):
    """xi(rho) has eigenvalues that an O(kappa^2) error cannot explain."""


class ApproximationArtifactError(ValueError):
    """Strict-mode version of :class:`ApproximationArtifactWarning`."""


def _artifact(msg: str, strict: bool) -> None:
    if strict:
        raise ApproximationArtifactError(msg)
    warnings.warn(msg, ApproximationArtifactWarning, stacklevel=3)


def xi_matrix(rho) -> np.ndarray:
    """``rho (Sy x Sy) rho* (Sy x Sy)`` with ``rho*`` the entrywise conjugate."""
    r = np.asarray(rho, dtype=complex)
    return r @ SY_SY @ r.conj() @ SY_SY


def _xi_spectrum(rho, kappa: float | None, clamp: bool) -> tuple[np.ndarray, list[str]]:
    """Descending real parts of the xi eigenvalues and the artifacts found."""
    xi = xi_matrix(rho)
    try:
        ev = np.linalg.eigvals(xi)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigenvalues of xi did not converge for\n{np.asarray(rho)}") from exc
    problems = []
    worst_im = float(np.abs(ev.imag).max())
    if worst_im > IMAG_TOL:
        problems.append(f"xi eigenvalue with imaginary part {worst_im:.3e}")
    re = np.sort(ev.real)[::-1]
    if not clamp:
        return re, problems
    # eigenvalues below the solver's roundoff floor are zero; left alone their
    # square roots would put O(sqrt(eps)) noise into the concurrence
    re = np.where(np.abs(re) <= ROUNDOFF_FLOOR * np.linalg.norm(xi, 2), 0.0, re)
    tol = 10.0 * kappa * kappa if kappa is not None else DEFAULT_NEG_TOL
    if re[-1] < -tol:
        problems.append(f"xi eigenvalue {re[-1]:.3e} below -{tol:.1e}")
    return np.clip(re, 0.0, None), problems


def _report(problems: list[str], strict: bool) -> None:
    for msg in problems:
        _artifact(msg, strict)


def xi_eigenvalues(rho, kappa: float | None = None, strict: bool = False,
                   clamp: bool = True) -> np.ndarray:
    """Eigenvalues of ``xi(rho)`` sorted descending.

    Real parts are returned; an imaginary part above 1e-8 is reported as an
    approximation artifact.  With ``clamp`` negative values are set to 0;
    values below ``-10 kappa^2`` (or ``-1e-10`` without ``kappa``) are
    reported first.
    """
    re, problems = _xi_spectrum(rho, kappa, clamp)
    _report(problems, strict)
    return re


def _from_spectrum(v: np.ndarray) -> float:
    s = np.sqrt(v)
    return float(min(1.0, max(0.0, s[0] - s[1:].sum())))


def concurrence(rho, kappa: float | None = None, strict: bool = False) -> float:
    """``max(0, sqrt(v1) - sqrt(v2) - sqrt(v3) - sqrt(v4))`` for the eigenvalues of xi."""
    return _from_spectrum(xi_eigenvalues(rho, kappa=kappa, strict=strict))


def concurrence_checked(rho, kappa: float | None = None) -> tuple[float, int]:
    """Concurrence and the number of artifacts, without issuing warnings.

    Safe to call from several threads (no warning filters are touched).
    """
    v, problems = _xi_spectrum(rho, kappa, clamp=True)
    return _from_spectrum(v), len(problems)


def concurrence_series(rhos, kappa: float | None = None, strict: bool = False) -> np.ndarray:
    """Concurrence of a stack of matrices ``(T, 4, 4)``."""
    return np.array([concurrence(r, kappa=kappa, strict=strict) for r in np.asarray(rhos)])


# ---------------------------------------------------------------- initial states

@dataclass(frozen=True)
class SuperpositionFamily:
    """``psi ~ a1 |++> + a2 |-->``."""

    a1: complex
    a2: complex

    @classmethod
    def from_p(cls, p: float) -> "SuperpositionFamily":
        """Real amplitudes with ``p1(0) = p``."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        return cls(math.sqrt(p), math.sqrt(1.0 - p))

    @property
    def p(self) -> float:
        n = abs(self.a1) ** 2 + abs(self.a2) ** 2
        return abs(self.a1) ** 2 / n

    @property
    def alpha(self) -> complex:
        """Initial ``[rho]_{14} = a1 a2^* / (|a1|^2 + |a2|^2)``."""
        n = abs(self.a1) ** 2 + abs(self.a2) ** 2
        return complex(self.a1) * complex(self.a2).conjugate() / n


@dataclass(frozen=True)
class BraunProduct:
    """Qubit 1 in (|+> - |->)/sqrt 2, qubit 2 in (|+> + |->)/sqrt 2."""


@dataclass(frozen=True)
class Explicit:
    rho: DensityMatrix4


InitialState = Union[SuperpositionFamily, BraunProduct, Explicit]

_BRAUN_VECTOR = np.array([1.0, 1.0, -1.0, -1.0]) / 2.0


def initial_state(spec: InitialState) -> DensityMatrix4:
    if isinstance(spec, SuperpositionFamily):
        a1, a2 = complex(spec.a1), complex(spec.a2)
        if a1 == 0 and a2 == 0:
            raise ValueError("a1 and a2 must not both vanish")
        return DensityMatrix4.from_vector([a1, 0.0, 0.0, a2])
    if isinstance(spec, BraunProduct):
        return DensityMatrix4.from_vector(_BRAUN_VECTOR)
    if isinstance(spec, Explicit):
        return spec.rho
    raise TypeError(f"unknown initial state {spec!r}")


# ---------------------------------------------------------- disentanglement

@dataclass(frozen=True)
class DisentanglementInputs:
    p: float
    delta2: float
    delta3: float
    delta5: float
    kappa_max: float
    C_A: float = 1.0
    C_B: float = 1.0

    @property
    def delta_plus(self) -> float:
        return max(self.delta2, self.delta3)

    @property
    def delta_minus(self) -> float:
        return min(self.delta2, self.delta3)

    @classmethod
    def from_couplings(cls, p: float, c: CouplingSet, sd: SpectralData,
                       C_A: float = 1.0, C_B: float = 1.0) -> "DisentanglementInputs":
        """``delta2`` uses qubit 1's exchange couplings with sigma_g(B1), ``delta3`` qubit 2's."""
        d2 = c.exchange(1) * sd.sigma_g_B1
        d3 = c.exchange(2) * sd.sigma_g_B2
        d5 = d2 + d3 + ((c.kappa1 + c.kappa2) ** 2 + c.nu1**2 + c.nu2**2) * sd.sigma_f_0
        return cls(p, d2, d3, d5, c.kappa_max, C_A, C_B)


def bound_terms(d: DisentanglementInputs) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """The three candidate terms of each bound, ``t_A = max(A)`` and ``t_B = min(B)``."""
    if not 0.0 < d.p < 1.0:
        raise ValueError(f"need 0 < p < 1, got p={d.p}")
    if not (d.delta2 > 0 and d.delta3 > 0):
        raise ValueError("need delta2 > 0 and delta3 > 0")
    if not d.kappa_max > 0:
        raise ValueError("kappa_max must be positive")
    if not (d.C_A > 0 and d.C_B > 0):
        raise ValueError("C_A and C_B must be positive")
    q = d.p * (1.0 - d.p)
    k2 = d.kappa_max**2
    s = d.delta2 + d.delta3
    terms_A = (
        math.log(d.C_A * math.sqrt(q) / k2) / d.delta5,
        math.log(d.C_A * q / k2) / s,
        d.C_A / s,
    )
    terms_B = (
        math.log1p(d.C_B * q) / s,
        math.log1p(d.C_B * k2) / d.delta_plus,
        d.C_B / (d.delta5 - 0.5 * d.delta_minus),
    )
    return terms_A, terms_B


def disentanglement_bounds(d: DisentanglementInputs) -> tuple[float, float]:
    """``(t_A, t_B)``: concurrence vanishes for ``t >= t_A`` and is positive for ``t <= t_B``.

    Both are formula evaluations; ``C_A`` and ``C_B`` are unspecified
    positive constants (default 1).
    """
    terms_A, terms_B = bound_terms(d)
    return max(terms_A), min(terms_B)
