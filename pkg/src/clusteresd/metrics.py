"""Entanglement and fidelity measures.

The array-level helpers (``min_pt_eigenvalue``, ``wootters_lambda``,
``trace_overlap``) work on stacks of matrices; the named functions wrap them
for single :class:`DensityState` values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor
from .register import Y, DensityState, cluster_ket
from .tensor import as_matrix

YY = np.kron(Y, Y)
RANK_TOL = 1e-14


@dataclass(frozen=True)
class Bipartition:
    transposed_qubits: frozenset

    def __post_init__(self):
        qs = frozenset(int(q) for q in self.transposed_qubits)
        if not qs:
            raise ValueError("a bipartition must transpose at least one qubit")
        object.__setattr__(self, "transposed_qubits", qs)

    @classmethod
    def named(cls, label: str) -> "Bipartition":
        try:
            return cls(NAMED_CUTS[label])
        except KeyError:
            raise ValueError(f"unknown cut {label!r}; expected one of {sorted(NAMED_CUTS)}") from None

    @property
    def label(self) -> str:
        for name, qs in NAMED_CUTS.items():
            if qs == self.transposed_qubits:
                return name
        return "PT" + "".join(str(q) for q in sorted(self.transposed_qubits))


# Single-qubit cut and the three two-qubit cuts that contain qubit 0.
NAMED_CUTS = {
    "N1": frozenset({0}),
    "N12": frozenset({0, 1}),
    "N13": frozenset({0, 2}),
    "N14": frozenset({0, 3}),
}


def min_pt_eigenvalue(rho, subset) -> np.ndarray:
    return tensor.hermitian_eigenvalues(tensor.partial_transpose(rho, subset))[..., 0]


def negativity_min_eig(state: DensityState, part: Bipartition | str) -> float:
    """Lowest eigenvalue of the partial transpose across ``part``.

    Negative values certify entanglement across the cut.
    """
    if isinstance(part, str):
        part = Bipartition.named(part)
    for q in part.transposed_qubits:
        if not 0 <= q < state.n_qubits:
            raise IndexError(f"qubit {q} out of range")
    return float(min_pt_eigenvalue(state.matrix, part.transposed_qubits))


def witness_values(rho, representation: str) -> np.ndarray:
    psi = cluster_ket(representation)
    overlap = np.einsum("i,...ij,j->...", psi.conj(), as_matrix(rho), psi)
    return 0.5 - overlap.real


def witness_expectation(state: DensityState, representation: str) -> float:
    """Tr[(I/2 - |C><C|) rho]."""
    if state.n_qubits != 4:
        raise ValueError("cluster witnesses are defined on four qubits")
    return float(witness_values(state.matrix, representation))


def spin_flip(rho) -> np.ndarray:
    return YY @ np.conj(as_matrix(rho)) @ YY


def wootters_lambda(rho) -> np.ndarray:
    """sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4) for the spectrum of rho (YY) rho* (YY).

    With ``rho = B B^dag`` (``B = V sqrt(w)``) the square roots of the l_i are
    the singular values of the complex-symmetric ``M = B^T (YY) B``, since
    ``M^dag M`` is unitarily equivalent to ``sqrt(rho) rho~ sqrt(rho)``. Taking
    singular values directly keeps their absolute error at roundoff level
    instead of the square root of it. Eigenvalues of ``rho`` at or below
    ``RANK_TOL`` are treated as exact zeros.
    """
    rho = as_matrix(rho)
    if rho.shape[-2:] != (4, 4):
        raise ValueError("concurrence needs a two-qubit state")
    w, v = tensor.eigh(rho)
    if np.any(w < -tensor.PSD_CLAMP):
        raise ValueError(f"state has a negative eigenvalue {w.min():.3g}")
    root = np.where(w > RANK_TOL, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    b = v * root[..., None, :]
    m = np.swapaxes(b, -1, -2) @ YY @ b
    s = np.linalg.svd(m, compute_uv=False)
    return s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]


def concurrence_lambda(state: DensityState) -> float:
    """Unclamped Wootters quantity; negative values mean no concurrence."""
    if state.n_qubits != 2:
        raise ValueError("concurrence needs a two-qubit state")
    return float(wootters_lambda(state.matrix))


def concurrence(state: DensityState) -> float:
    return max(0.0, concurrence_lambda(state))


def trace_overlap(a, b) -> np.ndarray:
    return np.real(np.einsum("...ij,...ji->...", as_matrix(a), as_matrix(b)))


def overlap_fidelity(a: DensityState, b: DensityState) -> float:
    """Tr[a b]."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different dimensions")
    return float(trace_overlap(a.matrix, b.matrix))
