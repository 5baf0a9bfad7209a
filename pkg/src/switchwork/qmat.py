"""Dense complex-matrix kernel.

Products, adjoints, tensor products, partial traces, Hermitian
eigendecomposition, and matrix exponentials — everything downstream is built
on the four typed wrappers defined here.  Matrices are plain complex128
numpy arrays in row-major order; the wrappers validate the structural
invariants (Hermiticity, unit trace, positivity, unitarity) once at
construction so the physics code never has to re-check.

All operations are pure functions of immutable inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

# Absolute tolerances for the structural invariants.  Double-precision dense
# algebra at dim <= ~400 keeps round-off well below these.
TOL_HERM = 1e-10
TOL_TRACE = 1e-10
TOL_UNITARY = 1e-10
TOL_PSD = 1e-9
TOL_EIG = 1e-9


def _as_square_complex(mat: np.ndarray, what: str) -> np.ndarray:
    m = np.ascontiguousarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{what} contains non-finite entries")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """Positive, unit-trace, Hermitian matrix: the state of a system.

    Validation: Hermitian within TOL_HERM, trace 1 within TOL_TRACE, all
    eigenvalues >= -TOL_PSD.
    """

    mat: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        m = _as_square_complex(self.mat, "DensityMatrix")
        if np.max(np.abs(m - m.conj().T)) > TOL_HERM:
            raise ValueError("DensityMatrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > TOL_TRACE or abs(np.trace(m).imag) > TOL_TRACE:
            raise ValueError(f"DensityMatrix trace {np.trace(m)} != 1 within tolerance")
        evals = np.linalg.eigvalsh(m)
        if evals.min() < -TOL_PSD:
            raise ValueError(f"DensityMatrix has negative eigenvalue {evals.min():.3e}")
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dim", m.shape[0])


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian matrix; observables and Hamiltonians (units of energy, hbar = k_B = 1)."""

    mat: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        m = _as_square_complex(self.mat, "HermitianOperator")
        if np.max(np.abs(m - m.conj().T)) > TOL_HERM:
            raise ValueError("HermitianOperator is not Hermitian within tolerance")
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dim", m.shape[0])


@dataclass(frozen=True)
class UnitaryOperator:
    """Matrix with U†U = I within TOL_UNITARY."""

    mat: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        m = _as_square_complex(self.mat, "UnitaryOperator")
        defect = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if defect > TOL_UNITARY:
            raise ValueError(f"UnitaryOperator defect {defect:.3e} exceeds tolerance")
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dim", m.shape[0])


def _mat(x) -> np.ndarray:
    """Accept a wrapper or a bare array and return the ndarray."""
    return x.mat if hasattr(x, "mat") else np.asarray(x, dtype=complex)


def kron(a, b) -> np.ndarray:
    """Kronecker product; dims multiply.  Realizes the tensor product."""
    return np.kron(_mat(a), _mat(b))


def dagger(a) -> np.ndarray:
    return _mat(a).conj().T


def partial_trace(rho, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Reduce a (dim_a*dim_b)-dim matrix over one tensor factor.

    keep: "a" keeps the first factor, "b" the second.  Trace is preserved.
    """
    m = _mat(rho)
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(
            f"matrix of shape {m.shape} does not factor as {dim_a}x{dim_b}"
        )
    if keep not in ("a", "b"):
        raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "a":
        return np.einsum("ikjk->ij", r)
    return np.einsum("kikj->ij", r)


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns V) with
    h == V diag(w) V† to TOL_EIG.  Ties keep LAPACK's deterministic order.
    """
    m = _mat(h)
    if np.max(np.abs(m - m.conj().T)) > TOL_HERM:
        raise ValueError("eig_hermitian requires a Hermitian matrix")
    w, v = np.linalg.eigh(m)
    return w, v


def expm(g) -> np.ndarray:
    """Matrix exponential.

    (Anti-)Hermitian generators go through the spectral route, which is exact
    up to the eigendecomposition itself and guarantees the result of an
    anti-Hermitian generator passes the unitarity invariant.  Anything else
    falls back to scaling-and-squaring.
    """
    m = _as_square_complex(_mat(g), "expm argument")
    herm_defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    anti_defect = np.max(np.abs(m + m.conj().T)) if m.size else 0.0
    if herm_defect <= TOL_HERM:
        w, v = np.linalg.eigh(m)
        return (v * np.exp(w)) @ v.conj().T
    if anti_defect <= TOL_HERM:
        w, v = np.linalg.eigh(1j * m)  # 1j*m is Hermitian
        return (v * np.exp(-1j * w)) @ v.conj().T
    return scipy.linalg.expm(m)
