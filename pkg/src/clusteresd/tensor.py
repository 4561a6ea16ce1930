"""Dense complex linear algebra for registers of at most a handful of qubits.

Matrices are plain ``numpy`` complex arrays. Every routine accepts optional
leading batch dimensions, so ``(B, 16, 16)`` stacks of density matrices are
processed in one call; the analysis sweeps rely on this.

Qubit 0 is the leftmost tensor factor (the most significant bit of a basis
index), so the qubit called "qubit 1" in the usual chain labelling is index 0
here.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
JACOBI_OFFDIAG_TOL = 1e-13
DEGENERACY_TOL = 1e-11
PSD_CLAMP = 1e-10
_MAX_SWEEPS = 100


class NotHermitianError(ValueError):
    pass


def as_matrix(a, dtype=complex) -> np.ndarray:
    """Coerce ``a`` to a finite complex array whose last two axes form a matrix."""
    m = np.asarray(getattr(a, "matrix", a), dtype=dtype)
    if m.ndim < 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def n_qubits_of(m: np.ndarray) -> int:
    dim = m.shape[-1]
    n = dim.bit_length() - 1
    if m.shape[-2] != dim or 1 << n != dim:
        raise ValueError(f"shape {m.shape[-2:]} is not a qubit register")
    return n


def kron(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    m, n = a.shape[-2:]
    p, q = b.shape[-2:]
    out = np.einsum("...ij,...kl->...ikjl", a, b)
    return out.reshape(out.shape[:-4] + (m * p, n * q))


def kron_all(*factors) -> np.ndarray:
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def dagger(a) -> np.ndarray:
    return np.conj(np.swapaxes(np.asarray(a), -1, -2))


def _check_qubits(indices, n: int) -> list[int]:
    idx = [int(i) for i in indices]
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"qubit index {i} out of range for {n} qubits")
    if len(set(idx)) != len(idx):
        raise ValueError(f"repeated qubit index in {idx}")
    return idx


def partial_transpose(rho, subset) -> np.ndarray:
    """Transpose the tensor factors listed in ``subset``."""
    m = as_matrix(rho)
    n = n_qubits_of(m)
    subset = _check_qubits(sorted(set(subset)), n)
    batch = m.shape[:-2]
    nb = len(batch)
    t = m.reshape(batch + (2,) * (2 * n))
    axes = list(range(t.ndim))
    for q in subset:
        r, c = nb + q, nb + n + q
        axes[r], axes[c] = axes[c], axes[r]
    return t.transpose(axes).reshape(m.shape)


def partial_trace(rho, keep) -> np.ndarray:
    """Reduced matrix on the qubits in ``keep`` (output factors in that order)."""
    m = as_matrix(rho)
    n = n_qubits_of(m)
    keep = _check_qubits(keep, n)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    batch = m.shape[:-2]
    t = m.reshape(batch + (2,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for q in range(n):
        if q not in keep:
            cols[q] = rows[q]
    out = "".join(rows[q] for q in keep) + "".join(cols[q] for q in keep)
    t = np.einsum("..." + "".join(rows) + "".join(cols) + "->..." + out, t)
    d = 1 << len(keep)
    return t.reshape(batch + (d, d))


def hermiticity_error(h) -> float:
    h = np.asarray(h)
    d = h - np.swapaxes(h, -1, -2).conj()
    return float(np.sqrt(np.max(d.real ** 2 + d.imag ** 2, initial=0.0)))


def jacobi_eigh(h, tol: float = JACOBI_OFFDIAG_TOL):
    """Eigen-decomposition of Hermitian matrices by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending along the last axis and the
    matching eigenvectors as columns of ``v``. Batched over leading axes.
    Sweeps stop once every matrix in the batch has off-diagonal Frobenius
    norm below ``tol``.
    """
    a = as_matrix(h).copy()
    err = hermiticity_error(a)
    if err > HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian (max |h - h^dag| = {err:.3g})")
    a = 0.5 * (a + dagger(a))
    batch = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape((-1, n, n))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    off = ~np.eye(n, dtype=bool)

    for _ in range(_MAX_SWEEPS):
        offnorm = np.sqrt(np.sum(np.abs(a[:, off]) ** 2, axis=-1))
        if np.all(offnorm < tol):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                r = np.abs(apq)
                active = r > 1e-300
                if not np.any(active):
                    continue
                safe_r = np.where(active, r, 1.0)
                phase = np.where(active, apq / safe_r, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_r)
                sign = np.where(theta >= 0, 1.0, -1.0)
                t = sign / (np.abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = np.where(active, t * c, 0.0)
                c = np.where(active, c, 1.0)
                # J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q)
                cph = np.conj(phase)
                jpp, jpq = c, s
                jqp, jqq = -s * cph, c * cph

                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = colp * jpp[:, None] + colq * jqp[:, None]
                a[:, :, q] = colp * jpq[:, None] + colq * jqq[:, None]
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = rowp * np.conj(jpp)[:, None] + rowq * np.conj(jqp)[:, None]
                a[:, q, :] = rowp * np.conj(jpq)[:, None] + rowq * np.conj(jqq)[:, None]
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                a[:, p, p] = a[:, p, p].real
                a[:, q, q] = a[:, q, q].real

                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                v[:, :, p] = vp * jpp[:, None] + vq * jqp[:, None]
                v[:, :, q] = vp * jpq[:, None] + vq * jqq[:, None]
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.diagonal(a, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(batch + (n,)), v.reshape(batch + (n, n))


def lapack_eigh(h, vectors: bool = True):
    """Same contract as :func:`jacobi_eigh`, delegated to LAPACK through numpy."""
    a = as_matrix(h)
    err = hermiticity_error(a)
    if err > HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian (max |h - h^dag| = {err:.3g})")
    # LAPACK reads one triangle only, so no explicit symmetrisation is needed
    if vectors:
        return np.linalg.eigh(a)
    return np.linalg.eigvalsh(a), None


def _jacobi(h, vectors: bool = True):
    return jacobi_eigh(h)


SOLVERS = {"lapack": lapack_eigh, "jacobi": _jacobi}
DEFAULT_SOLVER = "lapack"


def _solver(name):
    try:
        return SOLVERS[name or DEFAULT_SOLVER]
    except KeyError:
        raise ValueError(f"unknown eigensolver {name!r}; expected one of {sorted(SOLVERS)}") from None


def eigh(h, solver: str | None = None):
    """Ascending eigenvalues and eigenvector columns of Hermitian ``h``."""
    return _solver(solver)(h)


def hermitian_eigenvalues(h, solver: str | None = None) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix in ascending order."""
    return _solver(solver)(h, vectors=False)[0]


def multiplicity(eigenvalues, value: float, tol: float = DEGENERACY_TOL) -> int:
    """How many entries of ``eigenvalues`` lie within ``tol`` of ``value``."""
    return int(np.sum(np.abs(np.asarray(eigenvalues) - value) <= tol))


def psd_sqrt(rho, clamp: float = PSD_CLAMP) -> np.ndarray:
    """Hermitian positive square root of a positive semidefinite matrix."""
    w, v = eigh(rho)
    if np.any(w < -clamp):
        raise ValueError(f"matrix has a negative eigenvalue {w.min():.3g}")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root[..., None, :]) @ dagger(v)
