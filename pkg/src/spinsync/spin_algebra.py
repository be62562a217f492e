"""Spin-1 operators, tensor embeddings and the two-spin coupled basis.

Basis order is descending magnetic quantum number, |1>, |0>, |-1>, so that
``s_z = diag(1, 0, -1)``. In tensor products site 0 is the leftmost
(slowest-varying) factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

SQRT2 = np.sqrt(2.0)
DIM = 3


@dataclass(frozen=True)
class SpinOps:
    s_z: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    s_x: np.ndarray
    s_y: np.ndarray

    @property
    def identity(self) -> np.ndarray:
        return np.eye(DIM, dtype=complex)


def make_spin1_ops() -> SpinOps:
    s_plus = np.zeros((DIM, DIM), dtype=complex)
    s_plus[0, 1] = SQRT2  # |1><0|
    s_plus[1, 2] = SQRT2  # |0><-1|
    s_minus = s_plus.conj().T.copy()
    s_z = np.diag([1.0, 0.0, -1.0]).astype(complex)
    s_x = (s_plus + s_minus) / 2
    s_y = (s_plus - s_minus) / 2j
    for m in (s_z, s_plus, s_minus, s_x, s_y):
        m.setflags(write=False)
    return SpinOps(s_z=s_z, s_plus=s_plus, s_minus=s_minus, s_x=s_x, s_y=s_y)


SPIN1 = make_spin1_ops()


def basis_state(*ms: int) -> np.ndarray:
    """Product ket |m_0, m_1, ...> with each m in {1, 0, -1}."""
    kets = []
    for m in ms:
        if m not in (1, 0, -1):
            raise ValueError(f"spin-1 projection must be 1, 0 or -1, got {m}")
        k = np.zeros(DIM, dtype=complex)
        k[1 - m] = 1.0
        kets.append(k)
    return reduce(np.kron, kets)


def embed(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Place a single-site operator at ``site`` of an ``n_spins`` chain."""
    op = np.asarray(op)
    if op.shape != (DIM, DIM):
        raise ValueError(f"expected a 3x3 operator, got shape {op.shape}")
    if not 0 <= site < n_spins:
        raise IndexError(f"site {site} out of range for {n_spins} spins")
    left = np.eye(DIM**site)
    right = np.eye(DIM ** (n_spins - site - 1))
    return np.kron(np.kron(left, op), right)


def site_ops(n_spins: int) -> list[SpinOps]:
    """Embedded spin operators for every site of the chain."""
    out = []
    for j in range(n_spins):
        out.append(
            SpinOps(
                s_z=embed(SPIN1.s_z, j, n_spins),
                s_plus=embed(SPIN1.s_plus, j, n_spins),
                s_minus=embed(SPIN1.s_minus, j, n_spins),
                s_x=embed(SPIN1.s_x, j, n_spins),
                s_y=embed(SPIN1.s_y, j, n_spins),
            )
        )
    return out


# Clebsch-Gordan table for 1 (x) 1, Condon-Shortley phases.
# Each entry maps (J, M) -> {(m1, m2): coefficient}.
_S2, _S3, _S6 = np.sqrt(2.0), np.sqrt(3.0), np.sqrt(6.0)
_CG_1x1: dict[tuple[int, int], dict[tuple[int, int], float]] = {
    (2, 2): {(1, 1): 1.0},
    (2, 1): {(1, 0): 1 / _S2, (0, 1): 1 / _S2},
    (2, 0): {(1, -1): 1 / _S6, (0, 0): 2 / _S6, (-1, 1): 1 / _S6},
    (2, -1): {(0, -1): 1 / _S2, (-1, 0): 1 / _S2},
    (2, -2): {(-1, -1): 1.0},
    (1, 1): {(1, 0): 1 / _S2, (0, 1): -1 / _S2},
    (1, 0): {(1, -1): 1 / _S2, (-1, 1): -1 / _S2},
    (1, -1): {(0, -1): 1 / _S2, (-1, 0): -1 / _S2},
    (0, 0): {(1, -1): 1 / _S3, (0, 0): -1 / _S3, (-1, 1): 1 / _S3},
}


@dataclass(frozen=True)
class CombinedBasis:
    labels: tuple[tuple[int, int], ...]
    states: np.ndarray  # columns are |J, M>_c in the product basis

    def ket(self, J: int, M: int) -> np.ndarray:
        return self.states[:, self.labels.index((J, M))]

    def projector(self, J: int, M: int) -> np.ndarray:
        k = self.ket(J, M)
        return np.outer(k, k.conj())


def combined_spin_basis() -> CombinedBasis:
    labels = tuple(sorted(_CG_1x1, key=lambda jm: (-jm[0], -jm[1])))
    cols = []
    for jm in labels:
        v = sum(c * basis_state(m1, m2) for (m1, m2), c in _CG_1x1[jm].items())
        cols.append(v)
    return CombinedBasis(labels=labels, states=np.column_stack(cols))


class ConsistencyError(RuntimeError):
    pass


def rho_infinity(atol: float = 1e-12) -> np.ndarray:
    """Two-spin steady state in the strong-coupling limit.

    Built as (S+_A S-_B + S-_A S+_B)^2 / 32 and checked against its
    projector form in the coupled basis.
    """
    # S+ = sqrt(2) J with J the integer shift; X = 2 (J_A J_B^T + h.c.) keeps
    # every entry exact in floating point
    j = np.diag([1.0, 1.0], k=1)
    y = np.kron(j, j.T) + np.kron(j.T, j)
    rho = (y @ y / 8).astype(complex)

    basis = combined_spin_basis()
    alt = np.zeros((9, 9), dtype=complex)
    for J in (1, 2):
        for M in (-1, 1):
            alt += basis.projector(J, M) / 8
    for J in (0, 2):
        alt += basis.projector(J, 0) / 4
    if np.max(np.abs(rho - alt)) > atol:
        raise ConsistencyError("operator and projector forms of rho_infinity disagree")
    return rho
