import itertools

import numpy as np
import pytest

from clusteresd import register, tensor
from clusteresd.register import (CZ, H, PLUS, X, Y, Z, DensityState, MeasurementSpec,
                                 MeasurementStep, ZeroProbabilityError)

from conftest import random_density

ZERO = np.array([1, 0], dtype=complex)


def H14():
    return register._embed(H, 0, 4) @ register._embed(H, 3, 4)


def test_density_state_validation():
    with pytest.raises(ValueError):
        DensityState(1, np.eye(2))
    with pytest.raises(ValueError):
        DensityState(1, np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ValueError):
        DensityState(2, np.eye(2) / 2)
    s = DensityState(1, np.eye(2) / 2)
    with pytest.raises(ValueError):
        s.matrix[0, 0] = 1


def test_cluster_c4_examples():
    s = register.cluster_c4()
    psi = register.cluster_ket("c4")
    assert np.trace(s.matrix).real == pytest.approx(1, abs=1e-15)
    assert psi[0b0000] == pytest.approx(0.5)
    assert psi[0b1111] == pytest.approx(-0.5)
    assert psi[0b0011] == psi[0b1100] == pytest.approx(0.5)
    assert s.purity() == pytest.approx(1, abs=1e-14)


def test_cluster_c4h_examples():
    s = register.cluster_c4h()
    assert s.purity() == pytest.approx(1, abs=1e-14)
    want = H14() @ register.cluster_ket("c4")
    assert np.max(np.abs(register.cluster_ket("c4h") - want)) <= 1e-12
    conj = H14() @ register.cluster_c4().matrix @ H14()
    assert np.max(np.abs(s.matrix - conj)) <= 1e-12
    assert np.max(np.abs(s.matrix - register.build_by_cz().matrix)) <= 1e-12


def test_build_by_cz():
    s = register.build_by_cz()
    assert s.purity() == pytest.approx(1, abs=1e-14)
    back = register.apply_single_qubit_gate(register.apply_single_qubit_gate(s, 0, H), 3, H)
    assert np.max(np.abs(back.matrix - register.cluster_c4().matrix)) <= 1e-12


def test_unknown_representation():
    with pytest.raises(ValueError):
        register.cluster_ket("c5")


def test_gate_examples(rng):
    rho = DensityState.from_matrix(random_density(3, rng))
    for q in range(3):
        twice = register.apply_single_qubit_gate(register.apply_single_qubit_gate(rho, q, H), q, H)
        assert np.max(np.abs(twice.matrix - rho.matrix)) <= 1e-12
    plus000 = DensityState.from_ket(np.kron(PLUS, np.kron(ZERO, ZERO)))
    flipped = register.apply_single_qubit_gate(plus000, 0, register.z_rotation(np.pi))
    minus = np.array([1, -1]) / np.sqrt(2)
    target = np.kron(minus, np.kron(ZERO, ZERO))
    assert np.real(target.conj() @ flipped.matrix @ target) == pytest.approx(1, abs=1e-12)


def test_sigma_z_on_qubit_1_flips_signs():
    psi = np.full(16, 0.25, dtype=complex)
    out = register.apply_single_qubit_gate(DensityState.from_ket(psi), 1, Z)
    sign = np.array([-1 if (x >> 2) & 1 else 1 for x in range(16)])
    assert np.max(np.abs(out.matrix - np.outer(sign * psi, sign * psi))) <= 1e-15


def test_gate_errors():
    s = register.cluster_c4()
    with pytest.raises(ValueError):
        register.apply_single_qubit_gate(s, 0, np.diag([1.0, 2.0]))
    with pytest.raises(IndexError):
        register.apply_single_qubit_gate(s, 4, H)


def test_gate_definitions():
    assert np.allclose(register.x_rotation(0.7), H @ register.z_rotation(0.7) @ H)
    assert np.array_equal(CZ, np.diag([1, 1, 1, -1]))


@pytest.mark.parametrize("theta", [0.0, 0.4, np.pi / 2, 2.5, -1.0])
def test_xy_projector(theta):
    pm = register.xy_projector(theta, -1)
    pp = register.xy_projector(theta, 1)
    for p in (pm, pp):
        assert np.allclose(p @ p, p, atol=1e-15)
        assert np.trace(p).real == pytest.approx(1)
    assert np.allclose(pm + pp, np.eye(2), atol=1e-15)
    # outcome -1 projects on the -1 eigenvector of cos X + sin Y
    n = np.cos(theta) * X + np.sin(theta) * Y
    assert np.allclose(n @ pm, -pm, atol=1e-15)
    k = register.xy_ket(theta, -1)
    assert np.allclose(np.outer(k, k.conj()), pm, atol=1e-15)


def test_xy_projector_plus():
    assert np.allclose(register.xy_projector(0.0, 1), np.outer(PLUS, PLUS))
    with pytest.raises(ValueError):
        register.xy_projector(0.0, 0)


def test_measurement_spec_validation():
    with pytest.raises(ValueError):
        MeasurementSpec.of([0, 0], [0.1, 0.2])
    with pytest.raises(ValueError):
        MeasurementStep(0, np.inf)
    with pytest.raises(ValueError):
        MeasurementStep(0, 0.0, outcome=0)
    with pytest.raises(ValueError):
        MeasurementSpec.of([0], [0.1, 0.2])


def test_measure_plus_zero():
    s = DensityState.from_ket(np.kron(PLUS, ZERO))
    out, prob = register.measure_postselect(s, MeasurementSpec.of([0], [0.0], outcome=1))
    assert prob == pytest.approx(1, abs=1e-15)
    assert np.allclose(out.matrix, np.diag([1, 0]), atol=1e-15)


def test_measure_zero_probability():
    s = DensityState.from_ket(np.kron(PLUS, ZERO))
    with pytest.raises(ZeroProbabilityError):
        register.measure_postselect(s, MeasurementSpec.of([0], [0.0], outcome=-1))


def test_measure_errors():
    s = register.cluster_c4()
    with pytest.raises(IndexError):
        register.measure_postselect(s, MeasurementSpec.of([7], [0.0]))
    with pytest.raises(ValueError):
        register.measure_postselect(s, MeasurementSpec.of([0, 1, 2, 3], [0.0] * 4))


def test_measure_c4h_three_qubits_pure(rng):
    s = register.cluster_c4h()
    for thetas in rng.uniform(0, 2 * np.pi, size=(10, 3)):
        out, prob = register.measure_postselect(s, MeasurementSpec.of([0, 1, 2], thetas))
        assert out.purity() == pytest.approx(1, abs=1e-12)
        assert 0 < prob <= 1


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.7, 4.0])
def test_measure_qubit0_of_c4h_half(theta):
    _, prob = register.measure_postselect(register.cluster_c4h(), MeasurementSpec.of([0], [theta]))
    assert prob == pytest.approx(0.5, abs=1e-12)


def test_postselected_state_is_density(rng):
    rho = DensityState.from_matrix(random_density(4, rng))
    for _ in range(10):
        spec = MeasurementSpec.of([3, 1], rng.uniform(0, 2 * np.pi, 2), outcome=1)
        out, prob = register.measure_postselect(rho, spec)
        assert prob > 1e-12
        assert abs(np.trace(out.matrix) - 1) <= 1e-10
        assert np.min(out.eigenvalues()) >= -1e-10


@pytest.mark.parametrize("qubits", [[0], [2, 0], [1, 2, 3]])
def test_branch_sum_reproduces_partial_trace(rng, qubits):
    rho = random_density(4, rng)
    thetas = rng.uniform(0, 2 * np.pi, len(qubits))
    total = 0
    for outcomes in itertools.product((-1, 1), repeat=len(qubits)):
        out, prob = register.postselect(rho, qubits, thetas, list(outcomes))
        total = total + prob * out
    keep = [q for q in range(4) if q not in qubits]
    assert np.max(np.abs(total - tensor.partial_trace(rho, keep))) <= 1e-10


def test_postselect_grid_matches_pointwise(rng):
    rho = random_density(4, rng)
    axes = [rng.uniform(0, np.pi, 3), rng.uniform(0, np.pi, 4)]
    grid, prob = register.postselect_grid(rho, [0, 2], axes)
    for i, j in np.ndindex(3, 4):
        one, pr = register.postselect(rho, [0, 2], [axes[0][i], axes[1][j]])
        assert np.max(np.abs(grid[i, j] - one)) <= 1e-14
        assert prob[i, j] == pytest.approx(pr, abs=1e-15)


def test_ideal_logical_rotation_examples(rng):
    u0 = register.ideal_logical_rotation(0, 0, 0)
    assert np.allclose(u0, H, atol=1e-15)
    for t in rng.uniform(0, 2 * np.pi, size=(10, 3)):
        u = register.ideal_logical_rotation(*t)
        assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-14)


def test_measurement_chain_implements_rotation(rng):
    # noiseless chain on the first three qubits of |C4H>
    s = register.cluster_c4h()
    for t in rng.uniform(0, 2 * np.pi, size=(20, 3)):
        out, _ = register.measure_postselect(s, MeasurementSpec.of([0, 1, 2], t))
        ket = register.ideal_logical_rotation(*t) @ PLUS
        assert np.real(ket.conj() @ out.matrix @ ket) == pytest.approx(1, abs=1e-10)
