"""4x4 two-qubit density matrices in the energy basis."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DensityMatrix4", "hermitize_from_lower"]

TRACE_TOL = 1e-10
PSD_TOL = 1e-10


def hermitize_from_lower(a: np.ndarray) -> np.ndarray:
    """Overwrite the strict upper triangle with the conjugate of the lower one.

    Works on stacks ``(..., 4, 4)``; the diagonal is made real.
    """
    a = np.array(a, dtype=complex, copy=True)
    iu = np.triu_indices(a.shape[-1], 1)
    a[..., iu[0], iu[1]] = a[..., iu[1], iu[0]].conj()
    idx = np.arange(a.shape[-1])
    a[..., idx, idx] = a[..., idx, idx].real
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix4:
    """Hermitian unit-trace 4x4 matrix in the basis |++>, |+->, |-+>, |-->.

    ``approximate`` marks states produced by the resonance approximation,
    which may carry eigenvalues as negative as O(kappa^2).
    """

    data: np.ndarray
    approximate: bool = False

    def __post_init__(self):
        a = np.asarray(self.data, dtype=complex)
        if a.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
        if np.abs(a - a.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(a) - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {np.trace(a).real} differs from 1")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)
        if not self.approximate and self.min_eigenvalue() < -PSD_TOL:
            raise ValueError(f"negative eigenvalue {self.min_eigenvalue():.3e}")

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __getitem__(self, idx):
        """1-based element access, ``rho[1, 4]``."""
        m, n = idx
        return self.data[m - 1, n - 1]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    @property
    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def populations(self) -> np.ndarray:
        return np.diag(self.data).real.copy()

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix4":
        psi = np.asarray(psi, dtype=complex)
        nrm = np.vdot(psi, psi).real
        if nrm == 0:
            raise ValueError("zero state vector")
        psi = psi / np.sqrt(nrm)
        return cls(np.outer(psi, psi.conj()))
