"""Single-qubit dephasing and its product extension to a whole register."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .register import DensityState, cluster_ket
from .tensor import as_matrix, kron_all, n_qubits_of


def p_of_time(kappa: float, tau: float) -> float:
    """Dephasing strength after time ``tau`` at rate ``kappa``: 1 - exp(-kappa tau)."""
    if kappa < 0 or tau < 0:
        raise ValueError("kappa and tau must be non-negative")
    return float(-np.expm1(-kappa * tau))


@dataclass(frozen=True)
class DephasingProfile:
    """Per-qubit dephasing strengths.

    Build one directly from strengths, with :meth:`uniform`, from a rate and a
    time with :meth:`from_time`, or with :meth:`from_schedule`, where qubit
    ``q`` gets ``clamp(base + k_q * dp, 0, 1)``.
    """

    p_per_qubit: tuple[float, ...]
    kappa: float | None = None
    tau: float | None = None
    schedule: tuple[float, float, tuple[int, ...]] | None = None

    def __post_init__(self):
        ps = tuple(float(p) for p in self.p_per_qubit)
        if not ps:
            raise ValueError("profile needs at least one qubit")
        for p in ps:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"dephasing strength {p} outside [0, 1]")
        object.__setattr__(self, "p_per_qubit", ps)

    @classmethod
    def uniform(cls, p: float, n_qubits: int = 4) -> "DephasingProfile":
        return cls((p,) * n_qubits)

    @classmethod
    def from_time(cls, kappa: float, tau: float, n_qubits: int = 4) -> "DephasingProfile":
        return cls((p_of_time(kappa, tau),) * n_qubits, kappa=kappa, tau=tau)

    @classmethod
    def from_schedule(cls, base: float, dp: float, ks: Sequence[int]) -> "DephasingProfile":
        ks = tuple(int(k) for k in ks)
        ps = tuple(min(1.0, max(0.0, base + k * dp)) for k in ks)
        return cls(ps, schedule=(float(base), float(dp), ks))

    @property
    def n_qubits(self) -> int:
        return len(self.p_per_qubit)

    def as_dict(self) -> dict:
        d = {"p_per_qubit": list(self.p_per_qubit)}
        if self.kappa is not None:
            d["kappa"], d["tau"] = self.kappa, self.tau
        if self.schedule is not None:
            base, dp, ks = self.schedule
            d["schedule"] = {"base": base, "dp": dp, "k": list(ks)}
        return d


def dephasing_kraus(p):
    """The Kraus pair diag(1, sqrt(1-p)), diag(0, sqrt(p)); ``p`` may be an array."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("dephasing strength must lie in [0, 1]")
    k1 = np.zeros(p.shape + (2, 2), dtype=complex)
    k2 = np.zeros(p.shape + (2, 2), dtype=complex)
    k1[..., 0, 0] = 1.0
    k1[..., 1, 1] = np.sqrt(1.0 - p)
    k2[..., 1, 1] = np.sqrt(p)
    return k1, k2


def kraus_operators(ps) -> list[np.ndarray]:
    """All ``2^n`` products ``K_i x K_j x ...`` for per-qubit strengths ``ps``.

    ``ps`` has shape ``(..., n)``; each returned operator has shape ``(..., 2^n, 2^n)``.
    """
    ps = np.asarray(ps, dtype=float)
    pairs = [dephasing_kraus(ps[..., q]) for q in range(ps.shape[-1])]
    return [kron_all(*(pair[i] for pair, i in zip(pairs, choice)))
            for choice in itertools.product((0, 1), repeat=len(pairs))]


def kraus_diagonals(ps) -> np.ndarray:
    """Diagonals of :func:`kraus_operators`, stacked as columns.

    Every dephasing Kraus product is diagonal; column ``l`` of the result
    (shape ``(..., 2^n, 2^n)``) is the diagonal of ``A_l``.
    """
    ps = np.asarray(ps, dtype=float)
    if np.any((ps < 0) | (ps > 1)):
        raise ValueError("dephasing strength must lie in [0, 1]")
    d = np.ones(ps.shape[:-1] + (1, 1))
    for q in range(ps.shape[-1]):
        p = ps[..., q, None, None]
        # rows: basis bit of qubit q; cols: which Kraus factor (K1, K2)
        k = np.concatenate([np.concatenate([np.ones_like(p), np.zeros_like(p)], -1),
                            np.concatenate([np.sqrt(1 - p), np.sqrt(p)], -1)], -2)
        d = (d[..., :, None, :, None] * k[..., None, :, None, :])
        d = d.reshape(ps.shape[:-1] + (d.shape[-4] * 2, d.shape[-2] * 2))
    return d


def dephase(rho, ps) -> np.ndarray:
    """Sum of A_l rho A_l^dag over the 2^n product Kraus operators.

    Batched over leading axes of ``rho`` and ``ps``. Each A_l is diagonal
    with diagonal a_l, so the sum is ``rho_ij * sum_l a_l[i] a_l[j]``; the sum
    over ``l`` is done as one matrix product.
    """
    rho = as_matrix(rho)
    ps = np.asarray(ps, dtype=float)
    if ps.shape[-1] != n_qubits_of(rho):
        raise ValueError(f"{ps.shape[-1]} dephasing strengths for a {n_qubits_of(rho)}-qubit state")
    diags = kraus_diagonals(ps)
    return rho * (diags @ np.swapaxes(diags, -1, -2))


def apply_dephasing(state: DensityState, profile: DephasingProfile) -> DensityState:
    if profile.n_qubits != state.n_qubits:
        raise ValueError(f"profile covers {profile.n_qubits} qubits, state has {state.n_qubits}")
    return DensityState(state.n_qubits, dephase(state.matrix, profile.p_per_qubit))


def mixed_initial(q: float, representation: str = "c4") -> DensityState:
    """(1 - q) I/16 + q |C><C| for the chosen cluster representation."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixing weight {q} outside [0, 1]")
    psi = cluster_ket(representation)
    dim = psi.size
    return DensityState.from_matrix((1 - q) / dim * np.eye(dim) + q * np.outer(psi, psi.conj()))
