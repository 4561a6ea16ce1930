import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clusteresd import noise, register
from clusteresd.noise import DephasingProfile, apply_dephasing, dephase, dephasing_kraus
from clusteresd.register import CZ, DensityState

from conftest import random_density

strength = st.floats(0.0, 1.0)
seeds = st.integers(0, 2**32 - 1)


def kraus_sum(rho, ps):
    """Explicit sum of A_l rho A_l^dag over every product of single-qubit Kraus factors."""
    pairs = [dephasing_kraus(p) for p in ps]
    out = np.zeros_like(rho, dtype=complex)
    for choice in itertools.product((0, 1), repeat=len(ps)):
        a = np.eye(1)
        for pair, i in zip(pairs, choice):
            a = np.kron(a, pair[i])
        out += a @ rho @ a.conj().T
    return out


def masked(rho, ps):
    """Off-diagonal (x, y) scaled by sqrt(1 - p_q) for every qubit where x and y differ."""
    n = len(ps)
    out = np.array(rho, dtype=complex)
    for x, y in np.ndindex(out.shape):
        for q in range(n):
            shift = n - 1 - q
            if (x >> shift) & 1 != (y >> shift) & 1:
                out[x, y] *= np.sqrt(1 - ps[q])
    return out


def test_kraus_examples():
    k1, k2 = dephasing_kraus(0.0)
    assert np.array_equal(k1, np.eye(2)) and not k2.any()
    k1, k2 = dephasing_kraus(1.0)
    assert np.array_equal(k1, np.diag([1, 0])) and np.array_equal(k2, np.diag([0, 1]))
    k1, k2 = dephasing_kraus(0.37)
    total = k1.conj().T @ k1 + k2.conj().T @ k2
    assert np.max(np.abs(total - np.eye(2))) <= 1e-15


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_kraus_range(p):
    with pytest.raises(ValueError):
        dephasing_kraus(p)


def test_kraus_operators_complete(rng):
    for _ in range(100):
        ops = noise.kraus_operators(rng.random(4))
        assert len(ops) == 16
        total = sum(a.conj().T @ a for a in ops)
        assert np.max(np.abs(total - np.eye(16))) <= 1e-12


def test_kraus_diagonals_match_operators(rng):
    ps = rng.random(4)
    diags = noise.kraus_diagonals(ps)
    for l, a in enumerate(noise.kraus_operators(ps)):
        assert np.allclose(np.diag(np.diag(a)), a)
        assert np.allclose(np.diag(a), diags[:, l], atol=1e-15)


def test_dephasing_identity_at_zero(rng):
    rho = random_density(4, rng)
    assert np.max(np.abs(dephase(rho, [0.0] * 4) - rho)) <= 1e-15


def test_full_dephasing_of_c4():
    rho = dephase(register.cluster_c4().matrix, [1.0] * 4)
    want = np.zeros(16)
    want[[0b0000, 0b0011, 0b1100, 0b1111]] = 0.25
    assert np.max(np.abs(rho - np.diag(want))) <= 1e-15


def test_off_diagonal_at_point_three():
    rho = dephase(register.cluster_c4().matrix, [0.3] * 4)
    assert rho[0b0000, 0b0011].real == pytest.approx(0.175, abs=1e-15)
    oracle = kraus_sum(register.cluster_c4().matrix, [0.3] * 4)
    assert np.max(np.abs(rho - oracle)) <= 1e-15


@given(seeds, st.lists(strength, min_size=4, max_size=4))
@settings(max_examples=40, deadline=None)
def test_matches_kraus_sum_and_masking(seed, ps):
    rho = random_density(4, np.random.default_rng(seed))
    out = dephase(rho, ps)
    assert np.max(np.abs(out - kraus_sum(rho, ps))) <= 1e-12
    assert np.max(np.abs(out - masked(rho, ps))) <= 1e-12
    assert np.allclose(np.diag(out), np.diag(rho), atol=1e-15)


def test_general_qubit_count(rng):
    rho = random_density(3, rng)
    ps = [0.2, 0.5, 0.9]
    assert np.max(np.abs(dephase(rho, ps) - kraus_sum(rho, ps))) <= 1e-14


def test_channel_preserves_state(rng):
    for _ in range(100):
        rho = random_density(4, rng, rank=int(rng.integers(1, 17)))
        out = dephase(rho, rng.random(4))
        assert abs(np.trace(out) - 1) <= 1e-10
        assert np.max(np.abs(out - out.conj().T)) <= 1e-10
        assert np.linalg.eigvalsh(out).min() >= -1e-10


def test_semigroup(rng):
    for _ in range(100):
        rho = random_density(4, rng)
        p1, p2 = rng.random(4), rng.random(4)
        twice = dephase(dephase(rho, p1), p2)
        once = dephase(rho, 1 - (1 - p1) * (1 - p2))
        assert np.max(np.abs(twice - once)) <= 1e-12


def test_commutes_with_cz(rng):
    cz = np.kron(np.eye(2), np.kron(CZ, np.eye(2)))
    for _ in range(20):
        rho = random_density(4, rng)
        ps = rng.random(4)
        before = dephase(cz @ rho @ cz, ps)
        after = cz @ dephase(rho, ps) @ cz
        assert np.max(np.abs(before - after)) <= 1e-12


def test_batched_dephasing(rng):
    rho = random_density(4, rng)
    ps = rng.random((3, 5, 4))
    out = dephase(rho, ps)
    assert out.shape == (3, 5, 16, 16)
    assert np.allclose(out[2, 1], dephase(rho, ps[2, 1]), atol=1e-15)


def test_apply_dephasing_profile():
    s = register.cluster_c4()
    out = apply_dephasing(s, DephasingProfile.uniform(0.3))
    assert isinstance(out, DensityState)
    assert out.matrix[0, 3].real == pytest.approx(0.175)
    with pytest.raises(ValueError):
        apply_dephasing(s, DephasingProfile.uniform(0.3, n_qubits=3))
    with pytest.raises(ValueError):
        dephase(s.matrix, [0.1, 0.2])


def test_p_of_time():
    assert noise.p_of_time(3.0, 0.0) == 0.0
    assert noise.p_of_time(1.0, 50.0) == pytest.approx(1, abs=1e-12)
    assert noise.p_of_time(1.0, np.log(2)) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        noise.p_of_time(-1.0, 1.0)
    with pytest.raises(ValueError):
        noise.p_of_time(1.0, -1.0)


def test_profiles():
    prof = DephasingProfile.from_time(2.0, 0.5)
    assert prof.p_per_qubit == (pytest.approx(1 - np.exp(-1)),) * 4
    assert prof.as_dict()["kappa"] == 2.0
    sched = DephasingProfile.from_schedule(0.5, 0.2, [0, 1, 3, -4])
    assert sched.p_per_qubit == pytest.approx((0.5, 0.7, 1.0, 0.0))
    assert sched.as_dict()["schedule"]["k"] == [0, 1, 3, -4]
    with pytest.raises(ValueError):
        DephasingProfile((0.1, 1.2, 0.0, 0.0))
    with pytest.raises(ValueError):
        DephasingProfile(())


def test_mixed_initial():
    pure = noise.mixed_initial(1.0, "c4")
    assert np.max(np.abs(pure.matrix - register.cluster_c4().matrix)) <= 1e-15
    assert np.allclose(noise.mixed_initial(0.0, "c4h").matrix, np.eye(16) / 16)
    assert np.trace(noise.mixed_initial(0.6, "c4").matrix).real == pytest.approx(1)
    with pytest.raises(ValueError):
        noise.mixed_initial(1.1)


@given(st.floats(0.0, 1.0), strength)
@settings(max_examples=30, deadline=None)
def test_mixed_initial_witness_is_affine_in_q(q, p):
    # the identity part contributes 1/2 - 1/16 to the witness
    from clusteresd.metrics import witness_values
    rho = dephase(noise.mixed_initial(q, "c4").matrix, [p] * 4)
    w = witness_values(rho, "c4")
    w1 = witness_values(dephase(register.cluster_c4().matrix, [p] * 4), "c4")
    assert w == pytest.approx(q * w1 + (1 - q) * (0.5 - 1 / 16), abs=1e-12)
