"""Dense engine: gates against explicit matrix oracles, channel properties, sampling.

The oracle path builds full 2^n x 2^n operators with np.kron (bit 0 is the
least significant amplitude-index bit) and never touches the reshaped-view
kernels it checks.
"""

import math

import numpy as np
import pytest

from qredshift.gravity import DephasingAngles
from qredshift.rng import shot_stream, shot_uniforms
from qredshift.statevector import (
    DENSITY_MAX_QUBITS,
    MAX_QUBITS,
    DensityMatrix,
    ResourceCapError,
    apply_channel,
    apply_diagonal_phase,
    apply_gate,
    controlled_x,
    density_from_amplitudes,
    diagonal_phase,
    hadamard,
    init_zero,
    measure_qubit,
    probability_of,
    s_gate,
    x_gate,
)

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def kron_on(op: np.ndarray, bit: int, m: int) -> np.ndarray:
    """op acting on `bit` of an m-qubit register, bit 0 least significant."""
    full = np.eye(1, dtype=complex)
    for k in reversed(range(m)):
        full = np.kron(full, op if k == bit else I2)
    return full


def cx_matrix(control: int, target: int, m: int) -> np.ndarray:
    dim = 1 << m
    mat = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        out = j ^ (1 << target) if (j >> control) & 1 else j
        mat[out, j] = 1.0
    return mat


def random_state(m: int, seed: int):
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    vec /= np.linalg.norm(vec)
    state = init_zero(m)
    state.amplitudes[:] = vec
    return state


class TestInit:
    def test_single_qubit(self):
        state = init_zero(1)
        np.testing.assert_array_equal(state.amplitudes, [1.0, 0.0])

    def test_three_qubits(self):
        state = init_zero(3)
        assert state.amplitudes.size == 8
        assert state.amplitudes[0] == 1.0
        assert np.all(state.amplitudes[1:] == 0.0)

    def test_unit_norm(self):
        assert init_zero(5).norm() == 1.0

    def test_cap(self):
        assert MAX_QUBITS >= 23
        with pytest.raises(ResourceCapError, match="branch"):
            init_zero(MAX_QUBITS + 1)

    def test_bad_count(self):
        with pytest.raises(ValueError):
            init_zero(0)


class TestGates:
    def test_hadamard_on_zero(self):
        state = apply_gate(init_zero(1), hadamard(0))
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_s_on_plus(self):
        state = apply_gate(apply_gate(init_zero(1), hadamard(0)), s_gate(0))
        np.testing.assert_allclose(state.amplitudes, [1 / math.sqrt(2), 1j / math.sqrt(2)])

    def test_x_sets_bit(self):
        state = apply_gate(init_zero(3), x_gate(2))
        assert state.amplitudes[4] == 1.0

    def test_cx_flips_when_control_set(self):
        state = apply_gate(init_zero(2), x_gate(0))
        state = apply_gate(state, controlled_x(0, 1))
        assert state.amplitudes[3] == 1.0

    def test_cx_idle_when_control_clear(self):
        state = apply_gate(init_zero(2), controlled_x(0, 1))
        assert state.amplitudes[0] == 1.0

    def test_multi_target_cx(self):
        state = apply_gate(init_zero(4), x_gate(0))
        state = apply_gate(state, controlled_x(0, 1, 2, 3))
        assert state.amplitudes[0b1111] == 1.0

    @pytest.mark.parametrize("m", [2, 3])
    def test_against_kron_oracle(self, m):
        rng = np.random.default_rng(m)
        for trial in range(25):
            state = random_state(m, seed=100 * m + trial)
            expected = state.amplitudes.copy()
            for _ in range(6):
                choice = rng.integers(0, 4)
                if choice == 0:
                    bit = int(rng.integers(0, m))
                    apply_gate(state, hadamard(bit))
                    expected = kron_on(H, bit, m) @ expected
                elif choice == 1:
                    bit = int(rng.integers(0, m))
                    apply_gate(state, s_gate(bit))
                    expected = kron_on(S, bit, m) @ expected
                elif choice == 2:
                    bit = int(rng.integers(0, m))
                    apply_gate(state, x_gate(bit))
                    expected = kron_on(X, bit, m) @ expected
                else:
                    control, target = rng.choice(m, size=2, replace=False)
                    apply_gate(state, controlled_x(int(control), int(target)))
                    expected = cx_matrix(int(control), int(target), m) @ expected
            np.testing.assert_allclose(state.amplitudes, expected, atol=1e-13)

    def test_norm_preserved_random_circuit(self):
        state = random_state(6, seed=3)
        rng = np.random.default_rng(4)
        for _ in range(60):
            bit = int(rng.integers(0, 6))
            gate = [hadamard(bit), s_gate(bit), x_gate(bit)][rng.integers(0, 3)]
            apply_gate(state, gate)
        assert abs(state.norm() - 1.0) < 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            apply_gate(init_zero(2), hadamard(2))

    def test_cx_duplicate_targets_rejected(self):
        with pytest.raises(ValueError, match="distinct"):
            apply_gate(init_zero(3), controlled_x(0, 1, 1))

    def test_measure_gate_not_applicable(self):
        from qredshift.statevector import measure

        with pytest.raises(ValueError, match="runner"):
            apply_gate(init_zero(1), measure(0))


class TestDiagonalPhase:
    def test_zero_angles_identity(self):
        state = random_state(3, seed=9)
        before = state.amplitudes.copy()
        apply_diagonal_phase(state, DephasingAngles(angles=np.zeros(2), time=0.0))
        np.testing.assert_array_equal(state.amplitudes, before)

    def test_pi_flips_x_expectation(self):
        # ancilla + one register qubit in |+x>
        state = init_zero(2)
        apply_gate(state, hadamard(1))

        def x_expectation(s):
            flipped = s.amplitudes.reshape(-1, 2, 2)[:, ::-1, :]
            return float(np.real(np.vdot(s.amplitudes, flipped.reshape(-1))))

        assert x_expectation(state) == pytest.approx(1.0, abs=1e-12)
        apply_diagonal_phase(state, DephasingAngles(angles=np.array([math.pi]), time=1.0))
        assert x_expectation(state) == pytest.approx(-1.0, abs=1e-12)

    def test_composition_adds_angles(self):
        rng = np.random.default_rng(11)
        theta1, theta2 = rng.uniform(-2, 2, size=(2, 4))
        a = random_state(5, seed=12)
        b = a.copy()
        apply_diagonal_phase(a, DephasingAngles(angles=theta1, time=1.0))
        apply_diagonal_phase(a, DephasingAngles(angles=theta2, time=1.0))
        apply_diagonal_phase(b, DephasingAngles(angles=theta1 + theta2, time=2.0))
        np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-14)

    def test_norm_unchanged(self):
        state = random_state(4, seed=13)
        apply_diagonal_phase(state, DephasingAngles(angles=np.array([0.3, -0.7, 2.1]), time=1.0))
        assert abs(state.norm() - 1.0) < 1e-12

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="angles"):
            apply_diagonal_phase(init_zero(3), DephasingAngles(angles=np.zeros(3), time=0.0))

    def test_phase_gate_wrapper(self):
        state = random_state(3, seed=21)
        twin = state.copy()
        angles = DephasingAngles(angles=np.array([0.4, -1.1]), time=1.0)
        apply_gate(state, diagonal_phase(angles))
        apply_diagonal_phase(twin, angles)
        np.testing.assert_array_equal(state.amplitudes, twin.amplitudes)


def random_density(n: int, seed: int) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    mat = DensityMatrix(n, rho)
    mat.validate()
    return mat


class TestChannel:
    def test_diagonal_rho_unchanged(self):
        diag = np.diag(np.array([0.1, 0.2, 0.3, 0.4], dtype=complex))
        rho = DensityMatrix(2, diag)
        out = apply_channel(rho, np.array([0.7, -1.3]))
        np.testing.assert_array_equal(out.entries, diag)

    def test_single_qubit_coherence_phase(self):
        rho = DensityMatrix(1, np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex))
        theta = 0.8
        out = apply_channel(rho, np.array([theta]))
        assert out.entries[0, 1] == pytest.approx(0.5 * np.exp(-1j * theta), abs=1e-15)
        assert out.entries[1, 0] == pytest.approx(0.5 * np.exp(1j * theta), abs=1e-15)
        assert out.entries[0, 0] == 0.5 and out.entries[1, 1] == 0.5

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_cptp_properties(self, n):
        rng = np.random.default_rng(40 + n)
        for trial in range(5):
            rho = random_density(n, seed=50 * n + trial)
            theta = rng.uniform(-3, 3, size=n)
            out = apply_channel(rho, theta)
            np.testing.assert_array_equal(np.diag(out.entries), np.diag(rho.entries))
            assert abs(out.trace() - rho.trace()) < 1e-12
            np.testing.assert_allclose(np.abs(out.entries), np.abs(rho.entries), atol=1e-12)
            out.validate()

    def test_composition_in_time(self):
        rho = random_density(3, seed=77)
        rng = np.random.default_rng(78)
        rates = rng.uniform(-1, 1, size=3)
        t1, t2 = 0.6, 1.7
        stepwise = apply_channel(apply_channel(rho, rates * t1), rates * t2)
        direct = apply_channel(rho, rates * (t1 + t2))
        np.testing.assert_allclose(stepwise.entries, direct.entries, atol=1e-12)

    def test_pure_state_purity_invariant(self):
        rng = np.random.default_rng(81)
        vec = rng.normal(size=8) + 1j * rng.normal(size=8)
        vec /= np.linalg.norm(vec)
        rho = density_from_amplitudes(vec)
        out = apply_channel(rho, rng.uniform(-2, 2, size=3))
        assert out.purity() == pytest.approx(1.0, abs=1e-12)

    def test_matches_statevector_on_pure_states(self):
        # ancilla + 3 register qubits; channel leaves the ancilla alone
        state = random_state(4, seed=90)
        theta = np.random.default_rng(91).uniform(-2, 2, size=3)
        rho = density_from_amplitudes(state.amplitudes)
        rho_out = apply_channel(rho, np.concatenate(([0.0], theta)))
        apply_diagonal_phase(state, DephasingAngles(angles=theta, time=1.0))
        expected = np.outer(state.amplitudes, state.amplitudes.conj())
        np.testing.assert_allclose(rho_out.entries, expected, atol=1e-12)

    def test_angle_count_must_match(self):
        with pytest.raises(ValueError, match="angles"):
            apply_channel(random_density(2, seed=1), np.zeros(3))

    def test_density_cap(self):
        with pytest.raises(ResourceCapError):
            density_from_amplitudes(np.eye(1, 1 << (DENSITY_MAX_QUBITS + 1)).ravel())


class TestMeasurement:
    def test_measure_one_state(self):
        state = apply_gate(init_zero(1), x_gate(0))
        outcome, collapsed = measure_qubit(state, 0, shot_stream(0))
        assert outcome == 1
        assert abs(collapsed.norm() - 1.0) < 1e-12

    def test_collapse_renormalizes(self):
        state = apply_gate(init_zero(2), hadamard(1))
        outcome, collapsed = measure_qubit(state, 1, shot_stream(5))
        assert abs(collapsed.norm() - 1.0) < 1e-12
        assert probability_of(collapsed, 1, outcome) == pytest.approx(1.0, abs=1e-12)

    def test_loop_matches_vectorized_sampling(self):
        # measuring fresh copies along one stream == comparing the stream's
        # uniforms against p(1); same convention the protocol sampler uses
        state = apply_gate(init_zero(1), hadamard(0))
        p_one = probability_of(state, 0, 1)
        gen = shot_stream(314)
        loop = [measure_qubit(state.copy(), 0, gen)[0] for _ in range(1000)]
        vectorized = (shot_uniforms(314, 1000) < p_one).astype(int)
        np.testing.assert_array_equal(loop, vectorized)

    def test_balanced_superposition_statistics(self):
        state = apply_gate(init_zero(1), hadamard(0))
        p_one = probability_of(state, 0, 1)
        outcomes = shot_uniforms(2718, 10**6) < p_one
        # 3 sigma of a fair binomial at 1e6 shots is 0.0015; allow 0.002
        assert abs(outcomes.mean() - 0.5) < 0.002

    def test_probability_examples(self):
        assert probability_of(init_zero(1), 0, 0) == 1.0
        plus = apply_gate(init_zero(1), hadamard(0))
        assert probability_of(plus, 0, 1) == pytest.approx(0.5, abs=1e-12)

    def test_probability_bad_bit(self):
        with pytest.raises(ValueError):
            probability_of(init_zero(1), 0, 2)

    def test_identical_seeds_identical_shots(self):
        state = apply_gate(init_zero(1), hadamard(0))
        a = [measure_qubit(state.copy(), 0, shot_stream(99, start=i))[0] for i in range(50)]
        b = [measure_qubit(state.copy(), 0, shot_stream(99, start=i))[0] for i in range(50)]
        assert a == b
