"""Shared fixtures and helpers for the test suite."""
from __future__ import annotations

import math

import numpy as np
import pytest

from switchwork.qmat import DensityMatrix, HermitianOperator, UnitaryOperator
from switchwork.states import BlochState
from switchwork.switchcore import SwitchScenario


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_qubit_scenario(rng: np.random.Generator) -> SwitchScenario:
    """Generic (not necessarily passive) qubit scenario."""
    return SwitchScenario(
        rho_s=DensityMatrix(random_density(rng, 2)),
        control=BlochState(rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi)),
        u1=UnitaryOperator(random_unitary(rng, 2)),
        u2=UnitaryOperator(random_unitary(rng, 2)),
        h_s=HermitianOperator(random_hermitian(rng, 2)),
        h_c=HermitianOperator(random_hermitian(rng, 2)),
    )
