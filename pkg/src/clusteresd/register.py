"""Cluster-state preparation, gates and post-selected x-y plane measurements.

Conventions used throughout the package:

* ``H = (X + Z)/sqrt(2)``, ``CZ = diag(1, 1, 1, -1)``, ``Z(a) = diag(1, e^{ia})``
  and ``X(a) = H Z(a) H``.
* A measurement at angle ``theta`` in the x-y plane with outcome ``-1``
  projects onto ``(I - cos(theta) X - sin(theta) Y)/2``; outcome ``+1`` onto
  ``(I + cos(theta) X + sin(theta) Y)/2``.  Under this choice, measuring
  qubits 0, 1, 2 of the CZ-built chain with outcome -1 at angles
  ``theta1, theta2, theta3`` leaves qubit 3 in ``H Z(-theta3) X(theta2) Z(theta1)|+>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import tensor
from .tensor import as_matrix, dagger, kron_all

MEASUREMENT_CONVENTION = "xy-minus1-projects-I-minus-n.sigma;euler=(-t3,t2,t1)"
ZERO_PROBABILITY = 1e-12
STATE_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = (X + Z) / np.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def z_rotation(alpha: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * alpha)])


def x_rotation(alpha: float) -> np.ndarray:
    return H @ z_rotation(alpha) @ H


class ZeroProbabilityError(ValueError):
    """Raised when a post-selected branch has (numerically) zero weight."""


@dataclass(frozen=True)
class DensityState:
    """A validated ``2^n x 2^n`` density matrix."""

    n_qubits: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dim = 1 << self.n_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"{self.n_qubits} qubits need a {dim}x{dim} matrix, got {m.shape}")
        if tensor.hermiticity_error(m) > STATE_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1) > STATE_TOL:
            raise ValueError(f"density matrix has trace {tr}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix) -> "DensityState":
        m = as_matrix(matrix)
        return cls(tensor.n_qubits_of(m), m)

    @classmethod
    def from_ket(cls, ket) -> "DensityState":
        psi = np.asarray(ket, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls.from_matrix(np.outer(psi, psi.conj()))

    def eigenvalues(self) -> np.ndarray:
        return tensor.hermitian_eigenvalues(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def partial_trace(self, keep: Sequence[int]) -> "DensityState":
        return DensityState(len(keep), tensor.partial_trace(self.matrix, keep))

    def partial_transpose(self, subset: Iterable[int]) -> np.ndarray:
        return tensor.partial_transpose(self.matrix, subset)


@dataclass(frozen=True)
class MeasurementStep:
    qubit: int
    theta: float
    outcome: int = -1

    def __post_init__(self):
        if self.outcome not in (-1, 1):
            raise ValueError(f"outcome must be -1 or +1, got {self.outcome}")
        if not np.isfinite(self.theta):
            raise ValueError("measurement angle must be finite")


@dataclass(frozen=True)
class MeasurementSpec:
    steps: tuple[MeasurementStep, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        qubits = [s.qubit for s in steps]
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"qubit measured twice in {qubits}")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def of(cls, qubits: Sequence[int], thetas: Sequence[float], outcome: int = -1) -> "MeasurementSpec":
        if len(qubits) != len(thetas):
            raise ValueError("need one angle per measured qubit")
        return cls(tuple(MeasurementStep(int(q), float(t), outcome) for q, t in zip(qubits, thetas)))

    @property
    def qubits(self) -> list[int]:
        return [s.qubit for s in self.steps]


def _embed(gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """``I x ... x gate x ... x I`` with ``gate`` on ``qubit`` (gate may be batched)."""
    gate = np.asarray(gate, dtype=complex)
    factors = [gate if q == qubit else I2 for q in range(n)]
    return kron_all(*factors)


def _ket_c4() -> np.ndarray:
    psi = np.zeros(16, dtype=complex)
    psi[0b0000] = psi[0b0011] = psi[0b1100] = 0.5
    psi[0b1111] = -0.5
    return psi


def _ket_c4h() -> np.ndarray:
    return _embed(H, 0, 4) @ _embed(H, 3, 4) @ _ket_c4()


def cluster_ket(representation: str) -> np.ndarray:
    rep = representation.lower()
    if rep == "c4":
        return _ket_c4()
    if rep == "c4h":
        return _ket_c4h()
    raise ValueError(f"unknown representation {representation!r}")


def cluster_c4() -> DensityState:
    return DensityState.from_ket(_ket_c4())


def cluster_c4h() -> DensityState:
    return DensityState.from_ket(_ket_c4h())


def cluster_state(representation: str) -> DensityState:
    return DensityState.from_ket(cluster_ket(representation))


def build_by_cz(n_qubits: int = 4) -> DensityState:
    """|+> on every qubit followed by CZ on each neighbouring pair of the chain."""
    psi = PLUS
    for _ in range(n_qubits - 1):
        psi = np.kron(psi, PLUS)
    for q in range(n_qubits - 1):
        cz = kron_all(*([I2] * q + [CZ] + [I2] * (n_qubits - q - 2)))
        psi = cz @ psi
    return DensityState.from_ket(psi)


def apply_single_qubit_gate(state: DensityState, qubit: int, gate) -> DensityState:
    g = as_matrix(gate)
    if g.shape != (2, 2):
        raise ValueError("gate must be 2x2")
    if np.max(np.abs(g @ dagger(g) - I2)) > STATE_TOL:
        raise ValueError("gate is not unitary")
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"qubit {qubit} out of range")
    u = _embed(g, qubit, state.n_qubits)
    return DensityState(state.n_qubits, u @ state.matrix @ dagger(u))


def xy_projector(theta, outcome: int = -1) -> np.ndarray:
    """Projector for outcome ``outcome`` of cos(theta) X + sin(theta) Y.

    ``theta`` may be an array, giving a stack of projectors.
    """
    if outcome not in (-1, 1):
        raise ValueError(f"outcome must be -1 or +1, got {outcome}")
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)[..., None, None]
    s = np.sin(theta)[..., None, None]
    return 0.5 * (I2 + outcome * (c * X + s * Y))


def xy_ket(theta, outcome: int = -1) -> np.ndarray:
    """Eigenvector (1, outcome e^{i theta})/sqrt(2) spanning :func:`xy_projector`."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.ones_like(theta), outcome * np.exp(1j * theta)], axis=-1) / np.sqrt(2)


def postselect(rho, qubits: Sequence[int], thetas, outcomes: Sequence[int] | int = -1):
    """Batched projection of ``qubits`` followed by trace-out of them.

    ``rho`` has shape ``(..., d, d)``; ``thetas`` has shape ``(..., k)`` for the
    ``k`` measured qubits. Returns the normalised reduced states on the
    remaining qubits (in ascending order) and the branch probabilities.
    """
    rho = as_matrix(rho)
    n = tensor.n_qubits_of(rho)
    qubits = tensor._check_qubits(qubits, n)
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape[-1] != len(qubits):
        raise ValueError("need one angle per measured qubit")
    if isinstance(outcomes, int):
        outcomes = [outcomes] * len(qubits)
    if len(qubits) >= n:
        raise ValueError("at least one qubit must remain unmeasured")
    batch = np.broadcast_shapes(rho.shape[:-2], thetas.shape[:-1])
    t = np.broadcast_to(rho, batch + rho.shape[-2:]).reshape(batch + (2,) * (2 * n))
    nb = len(batch)
    remaining = list(range(n))
    # Tr_q[P rho P] for rank-1 P = |phi><phi| is <phi|_q rho |phi>_q
    for j in sorted(range(len(qubits)), key=lambda j: -qubits[j]):
        q = qubits[j]
        phi = xy_ket(thetas[..., j], outcomes[j])
        phi = np.broadcast_to(phi, batch + (2,))
        m = len(remaining)
        pos = remaining.index(q)
        row_ax, col_ax = nb + pos, nb + m + pos
        t = np.moveaxis(t, (row_ax, col_ax), (-2, -1))
        t = np.einsum("...ab,...a,...b->...", t,
                      np.conj(phi).reshape(batch + (1,) * (2 * m - 2) + (2,)),
                      phi.reshape(batch + (1,) * (2 * m - 2) + (2,)))
        remaining.pop(pos)
    d = 1 << len(remaining)
    reduced = t.reshape(batch + (d, d))
    prob = np.real(np.trace(reduced, axis1=-2, axis2=-1))
    if np.any(prob < ZERO_PROBABILITY):
        raise ZeroProbabilityError("post-selected outcome has zero probability")
    return reduced / prob[..., None, None], prob


def postselect_grid(rho, qubits: Sequence[int], theta_axes, outcomes: Sequence[int] | int = -1):
    """:func:`postselect` over the outer product of one angle list per measured qubit.

    ``rho`` is a single ``(d, d)`` matrix. The result has shape
    ``(len(theta_axes[0]), ..., len(theta_axes[-1]), d', d')``; contracting
    one qubit at a time makes this much cheaper than flattening the grid.
    """
    rho = as_matrix(rho)
    if rho.ndim != 2:
        raise ValueError("postselect_grid takes a single density matrix")
    n = tensor.n_qubits_of(rho)
    qubits = tensor._check_qubits(qubits, n)
    if len(theta_axes) != len(qubits):
        raise ValueError("need one angle axis per measured qubit")
    if isinstance(outcomes, int):
        outcomes = [outcomes] * len(qubits)
    if len(qubits) >= n:
        raise ValueError("at least one qubit must remain unmeasured")
    t = rho.reshape((2,) * (2 * n))
    remaining = list(range(n))
    # last qubit first, each new grid axis goes in front
    for j in reversed(range(len(qubits))):
        q = qubits[j]
        phi = xy_ket(np.asarray(theta_axes[j], dtype=float).ravel(), outcomes[j])
        m = len(remaining)
        pos = remaining.index(q)
        nb = t.ndim - 2 * m
        t = np.moveaxis(t, (nb + pos, nb + m + pos), (-2, -1))
        t = np.einsum("...ab,ka,kb->k...", t, np.conj(phi), phi)
        remaining.pop(pos)
    d = 1 << len(remaining)
    reduced = t.reshape(t.shape[:len(qubits)] + (d, d))
    prob = np.real(np.trace(reduced, axis1=-2, axis2=-1))
    if np.any(prob < ZERO_PROBABILITY):
        raise ZeroProbabilityError("post-selected outcome has zero probability")
    return reduced / prob[..., None, None], prob


def measure_postselect(state: DensityState, spec: MeasurementSpec) -> tuple[DensityState, float]:
    """Post-select every step of ``spec`` and return the state of the rest."""
    for q in spec.qubits:
        if not 0 <= q < state.n_qubits:
            raise IndexError(f"qubit {q} out of range")
    if len(spec.steps) >= state.n_qubits:
        raise ValueError("at least one qubit must remain unmeasured")
    thetas = [s.theta for s in spec.steps]
    outcomes = [s.outcome for s in spec.steps]
    rho, prob = postselect(state.matrix, spec.qubits, thetas, outcomes)
    return DensityState(state.n_qubits - len(spec.steps), rho), float(prob)


def ideal_logical_rotation(theta1: float, theta2: float, theta3: float) -> np.ndarray:
    """Logical unitary of the three-measurement chain (all outcomes -1).

    Equals ``H Z(-theta3) X(theta2) Z(theta1)``, i.e. Euler angles
    ``(alpha, beta, gamma) = (-theta3, theta2, theta1)`` in ``H Z(alpha) X(beta) Z(gamma)``.
    """
    return H @ z_rotation(-theta3) @ x_rotation(theta2) @ z_rotation(theta1)
