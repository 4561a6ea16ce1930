"""Numeric pipeline: dephase a cluster state, measure, compare with the noiseless run.

Everything here is vectorised: dephasing strengths and measurement angles
broadcast against each other and the result carries their common shape.

Pairs are named by the two *unmeasured* qubits in 1-based chain labels, the
way they are usually quoted (``"34"`` means qubits 1 and 2 were measured).
Measurement angles are always named after the measured qubit, so pair
``"24"`` takes ``(theta1, theta3)``.
"""

from __future__ import annotations

import numpy as np

from . import metrics
from .noise import dephase
from .register import cluster_ket, postselect, postselect_grid

# pair label -> measured qubits (0-based)
PAIRS = {
    "34": (0, 1),
    "24": (0, 2),
    "23": (0, 3),
    "14": (1, 2),
}
ROTATION_QUBITS = (0, 1, 2)


def _pair_qubits(pair: str) -> tuple[int, int]:
    try:
        return PAIRS[pair]
    except KeyError:
        raise ValueError(f"unknown pair {pair!r}; expected one of {sorted(PAIRS)}") from None


def pair_angle_names(pair: str) -> tuple[str, str]:
    a, b = _pair_qubits(pair)
    return f"theta{a + 1}", f"theta{b + 1}"


def initial_matrix(representation: str, q: float = 1.0) -> np.ndarray:
    psi = cluster_ket(representation)
    pure = np.outer(psi, psi.conj())
    if q == 1.0:
        return pure
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixing weight {q} outside [0, 1]")
    return (1 - q) / psi.size * np.eye(psi.size) + q * pure


def _strengths(p, ps):
    if ps is not None:
        return np.asarray(ps, dtype=float)
    p = np.asarray(p, dtype=float)
    return np.repeat(p[..., None], 4, axis=-1)


def dephased_cluster(representation: str, p=0.0, *, ps=None, q: float = 1.0) -> np.ndarray:
    """rho_r(p): the cluster state after the four-qubit product dephasing channel."""
    return dephase(initial_matrix(representation, q), _strengths(p, ps))


def _measure(representation, qubits, thetas, p, ps, q, reference=True):
    thetas = [np.asarray(t, dtype=float) for t in thetas]
    strengths = _strengths(p, ps)
    shape = np.broadcast_shapes(strengths.shape[:-1], *(t.shape for t in thetas))
    angle_stack = np.stack([np.broadcast_to(t, shape) for t in thetas], axis=-1)
    rho0 = initial_matrix(representation, q)
    # dephase at the strengths' own shape; a scalar p is applied once
    out, _ = postselect(dephase(rho0, strengths), qubits, angle_stack)
    if not reference:
        return out, None
    ref, _ = postselect(rho0, qubits, angle_stack)
    return out, ref


def grid_states(representation, qubits, p, theta_axes, *, ps=None, q=1.0):
    """Leftover states on the outer-product grid ``theta_axes`` at one noise setting."""
    strengths = _strengths(p, ps)
    if strengths.shape != (4,):
        raise ValueError("grid evaluation takes a single dephasing profile")
    rho = dephase(initial_matrix(representation, q), strengths)
    return postselect_grid(rho, qubits, theta_axes)[0]


def rotation_states(representation, p, theta1, theta2, theta3, *, ps=None, q=1.0):
    """(noisy, noiseless) one-qubit outputs after measuring qubits 0, 1, 2 with outcome -1."""
    return _measure(representation, ROTATION_QUBITS, (theta1, theta2, theta3), p, ps, q)


def rotation_fidelity(representation, p, theta1, theta2, theta3, *, ps=None, q=1.0):
    out, ref = rotation_states(representation, p, theta1, theta2, theta3, ps=ps, q=q)
    return metrics.trace_overlap(out, ref)


def pair_states(representation, pair, p, angle_a, angle_b, *, ps=None, q=1.0):
    """(noisy, noiseless) states of the unmeasured ``pair`` after two measurements."""
    return _measure(representation, _pair_qubits(pair), (angle_a, angle_b), p, ps, q)


def pair_fidelity(representation, pair, p, angle_a, angle_b, *, ps=None, q=1.0):
    out, ref = pair_states(representation, pair, p, angle_a, angle_b, ps=ps, q=q)
    return metrics.trace_overlap(out, ref)


def pair_concurrence(representation, pair, p, angle_a, angle_b, *, ps=None, q=1.0):
    """Unclamped Wootters quantity of the noisy leftover pair."""
    out, _ = _measure(representation, _pair_qubits(pair), (angle_a, angle_b), p, ps, q, reference=False)
    return metrics.wootters_lambda(out)


def pair_fidelity_and_concurrence(representation, pair, p, angle_a, angle_b, *, ps=None, q=1.0):
    out, ref = pair_states(representation, pair, p, angle_a, angle_b, ps=ps, q=q)
    return metrics.trace_overlap(out, ref), metrics.wootters_lambda(out)
