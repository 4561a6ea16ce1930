import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clusteresd import tensor
from clusteresd.noise import dephasing_kraus
from clusteresd.protocol import dephased_cluster

from conftest import random_density

I2 = np.eye(2)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0])
BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)
seeds = st.integers(0, 2**32 - 1)


def test_kron_identity_and_paulis():
    assert np.array_equal(tensor.kron(I2, I2), np.eye(4))
    assert np.array_equal(tensor.kron(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_kron_against_index_loop():
    a, b = dephasing_kraus(0.5)
    got = tensor.kron(a, b)
    want = np.zeros((4, 4), dtype=complex)
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        want[2 * i + k, 2 * j + l] = a[i, j] * b[k, l]
    assert np.array_equal(got, want)


def test_kron_batched_matches_numpy(rng):
    a = rng.normal(size=(5, 2, 3))
    b = rng.normal(size=(5, 4, 2))
    got = tensor.kron(a, b)
    for i in range(5):
        assert np.allclose(got[i], np.kron(a[i], b[i]), atol=1e-15)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_kron_associative(seed):
    r = np.random.default_rng(seed)
    a, b, c = (r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2)) for _ in range(3))
    left = tensor.kron(tensor.kron(a, b), c)
    right = tensor.kron(a, tensor.kron(b, c))
    assert np.max(np.abs(left - right)) <= 1e-12


def test_dagger(rng):
    assert np.array_equal(tensor.dagger(np.eye(3)), np.eye(3))
    assert np.array_equal(tensor.dagger(SY), SY)
    m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    assert np.array_equal(tensor.dagger(tensor.dagger(m)), m)


def test_partial_transpose_examples(rng):
    rho = random_density(3, rng)
    assert np.array_equal(tensor.partial_transpose(rho, []), rho)
    bell = np.outer(BELL, BELL)
    w = tensor.hermitian_eigenvalues(tensor.partial_transpose(bell, [0]))
    assert w[0] == pytest.approx(-0.5, abs=1e-12)


def test_partial_transpose_full_is_transpose(rng):
    rho = random_density(2, rng)
    assert np.allclose(tensor.partial_transpose(rho, [0, 1]), rho.T, atol=0)


@given(seeds, st.sets(st.integers(0, 3)))
@settings(max_examples=40, deadline=None)
def test_partial_transpose_involution_trace_hermiticity(seed, subset):
    rho = random_density(4, np.random.default_rng(seed))
    pt = tensor.partial_transpose(rho, subset)
    assert np.array_equal(tensor.partial_transpose(pt, subset), rho)
    assert abs(np.trace(pt) - np.trace(rho)) <= 1e-12
    assert tensor.hermiticity_error(pt) <= 1e-12


def test_partial_transpose_bad_index():
    with pytest.raises(IndexError):
        tensor.partial_transpose(np.eye(4) / 4, [2])


def test_partial_trace_examples(rng):
    a = random_density(1, rng)
    b = random_density(2, rng)
    assert np.allclose(tensor.partial_trace(np.kron(a, b), [0]), a, atol=1e-14)
    assert np.allclose(tensor.partial_trace(np.kron(a, b), [1, 2]), b, atol=1e-14)
    bell = np.outer(BELL, BELL)
    assert np.allclose(tensor.partial_trace(bell, [1]), I2 / 2, atol=1e-15)


def test_partial_trace_order_follows_keep(rng):
    a, b = random_density(1, rng), random_density(1, rng)
    assert np.allclose(tensor.partial_trace(np.kron(a, b), [1, 0]), np.kron(b, a), atol=1e-14)


@given(seeds, st.lists(st.integers(0, 3), min_size=1, max_size=4, unique=True))
@settings(max_examples=40, deadline=None)
def test_partial_trace_preserves_trace(seed, keep):
    rho = random_density(4, np.random.default_rng(seed))
    assert abs(np.trace(tensor.partial_trace(rho, keep)) - 1) <= 1e-12


def test_partial_trace_all_qubits_is_identity_map(rng):
    rho = random_density(3, rng)
    assert np.array_equal(tensor.partial_trace(rho, [0, 1, 2]), rho)


def test_partial_trace_errors():
    with pytest.raises(IndexError):
        tensor.partial_trace(np.eye(4) / 4, [5])
    with pytest.raises(ValueError):
        tensor.partial_trace(np.eye(4) / 4, [])


@pytest.mark.parametrize("solver", ["lapack", "jacobi"])
def test_eigenvalue_examples(solver):
    assert np.allclose(tensor.hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0]), solver), [1, 2, 3])
    assert np.allclose(tensor.hermitian_eigenvalues(SX, solver), [-1, 1])
    pt = tensor.partial_transpose(dephased_cluster("c4", 0.4), [0, 2])
    w = tensor.hermitian_eigenvalues(pt, solver)
    assert tensor.multiplicity(w, -0.15) == 4


def test_non_hermitian_rejected():
    m = np.array([[0, 1], [0, 0]], dtype=complex)
    for solver in ("lapack", "jacobi"):
        with pytest.raises(tensor.NotHermitianError):
            tensor.hermitian_eigenvalues(m, solver)
    with pytest.raises(ValueError):
        tensor.eigh(np.eye(2), solver="qr")


@given(seeds, st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_eigenvalues_sum_to_trace_and_solvers_agree(seed, n):
    rho = random_density(n, np.random.default_rng(seed))
    w = tensor.hermitian_eigenvalues(rho)
    wj, vj = tensor.jacobi_eigh(rho)
    assert abs(w.sum() - 1) <= 1e-10
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(w - wj)) <= 1e-11
    assert np.allclose(rho @ vj, vj * wj, atol=1e-11)


def test_jacobi_degenerate_and_batched(rng):
    rho = np.stack([dephased_cluster("c4", p) for p in (0.0, 0.3, 1.0)])
    pt = tensor.partial_transpose(rho, [0, 3])
    wj, _ = tensor.jacobi_eigh(pt)
    assert np.max(np.abs(wj - np.linalg.eigvalsh(pt))) <= 1e-12


def test_psd_sqrt_examples(rng):
    assert np.allclose(tensor.psd_sqrt(np.eye(4)), np.eye(4), atol=1e-15)
    assert np.allclose(tensor.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]), atol=1e-14)
    for _ in range(20):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = m @ m.conj().T
        s = tensor.psd_sqrt(rho)
        assert tensor.hermiticity_error(s) <= 1e-12
        assert np.min(np.linalg.eigvalsh(s)) >= -1e-10
        assert np.max(np.abs(s @ s - rho)) <= 1e-9


def test_psd_sqrt_rejects_negative():
    with pytest.raises(ValueError):
        tensor.psd_sqrt(np.diag([1.0, -0.1]))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        tensor.as_matrix(np.array([[np.nan, 0], [0, 1]]))
