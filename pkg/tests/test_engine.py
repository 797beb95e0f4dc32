import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import circuit_matrix
from gminlab.engine import (
    RegisterLayout,
    apply_gate,
    apply_gates_untimed,
    basis_state,
    dump_amplitudes,
    measure_register,
    reinitialize,
    run_circuit,
    zero_state,
)
from gminlab.gates import GateOp, cnot, cp, cz, h, mcx, mcz, p, swap, x
from gminlab.noise import NoiseParams


def random_gates(rng, nq, count):
    gates = []
    for _ in range(count):
        kind = rng.integers(0, 7)
        qs = rng.permutation(nq)
        if kind == 0:
            gates.append(x(int(qs[0])))
        elif kind == 1:
            gates.append(h(int(qs[0])))
        elif kind == 2:
            gates.append(p(float(rng.random() * 2 * np.pi), int(qs[0])))
        elif kind == 3:
            gates.append(cnot(int(qs[0]), int(qs[1])))
        elif kind == 4:
            gates.append(cp(float(rng.random() * 2 * np.pi), int(qs[0]), int(qs[1])))
        elif kind == 5:
            gates.append(swap(int(qs[0]), int(qs[1])))
        else:
            gates.append(cz(int(qs[0]), int(qs[1])))
    return gates


class TestLayout:
    def test_registers(self):
        lay = RegisterLayout(3, 4, 4, 2)
        assert lay.total == 13
        assert lay.group == (0, 1, 2)
        assert lay.pos1 == (3, 4, 5, 6)
        assert lay.pos2 == (7, 8, 9, 10)
        assert lay.ancilla == (11, 12)

    def test_max_ancilla_count(self):
        # m = n with maximum ancilla gives 4n - 2 qubits
        for n in (3, 4, 5):
            lay = RegisterLayout(n, n, n, n - 2)
            assert lay.total == 4 * n - 2
        with pytest.raises(ValueError):
            RegisterLayout(4, 4, 4, 3)

    def test_capacity(self):
        with pytest.raises(ValueError):
            RegisterLayout(10, 10, 10, 0, capacity=24)


class TestGateAction:
    def test_hadamard_on_zero(self):
        state = apply_gate(zero_state(1), h(0))
        assert np.allclose(state.amps, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_x_endianness(self):
        # qubit 0 is the least significant bit of the basis index
        state = apply_gate(zero_state(2), x(0))
        assert np.argmax(np.abs(state.amps)) == 0b01

    def test_mcz_on_all_ones(self):
        state = basis_state(4, 0b1111)
        apply_gate(state, mcz((0, 1, 2, 3)))
        assert state.amps[0b1111] == -1.0
        other = basis_state(4, 0b0111)
        apply_gate(other, mcz((0, 1, 2, 3)))
        assert other.amps[0b0111] == 1.0

    @given(st.integers(0, 10**6), st.integers(2, 5))
    @settings(max_examples=25, deadline=None)
    def test_matches_dense_matrices(self, seed, nq):
        rng = np.random.default_rng(seed)
        gates = random_gates(rng, nq, 12) + [mcz(tuple(range(nq))), mcx(tuple(range(nq - 1)), nq - 1)]
        state = zero_state(nq)
        apply_gates_untimed(state, [h(q) for q in range(nq)])
        apply_gates_untimed(state, gates)
        vec = np.full(1 << nq, (1 / math.sqrt(2)) ** nq, dtype=complex)
        want = circuit_matrix(gates, nq) @ vec
        assert np.abs(state.amps - want).max() < 1e-10

    def test_unitarity_roundtrip(self):
        rng = np.random.default_rng(9)
        gates = random_gates(rng, 4, 30)
        inverse = []
        for g in reversed(gates):
            if g.kind in ("P", "CP"):
                inverse.append(GateOp(g.kind, g.targets, g.controls, -g.param))
            else:
                inverse.append(g)
        state = zero_state(4)
        apply_gates_untimed(state, [h(q) for q in range(4)])
        before = state.amps.copy()
        apply_gates_untimed(state, gates)
        apply_gates_untimed(state, inverse)
        assert np.abs(state.amps - before).max() < 1e-9

    def test_norm_preserved(self):
        rng = np.random.default_rng(3)
        state = zero_state(5)
        apply_gates_untimed(state, random_gates(rng, 5, 60))
        assert state.norm() == pytest.approx(1.0, abs=1e-10)


class TestMeasurement:
    def test_born_rule_on_plus(self):
        rng = np.random.default_rng(17)
        ones = 0
        for _ in range(10_000):
            state = apply_gate(zero_state(1), h(0))
            ones += measure_register(state, (0,), rng)
        assert 0.485 <= ones / 10_000 <= 0.515

    def test_basis_state_is_deterministic(self):
        rng = np.random.default_rng(0)
        state = basis_state(3, 5)
        assert measure_register(state, (0, 1, 2), rng) == 5
        assert np.abs(state.amps[5]) == pytest.approx(1.0)

    def test_norm_after_projection(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            state = zero_state(4)
            apply_gates_untimed(state, random_gates(rng, 4, 20))
            measure_register(state, (1, 2), rng)
            assert state.norm() == pytest.approx(1.0, abs=1e-10)

    def test_repeat_measurement_idempotent(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            state = zero_state(4)
            apply_gates_untimed(state, random_gates(rng, 4, 25))
            first = measure_register(state, (0, 3), rng)
            assert measure_register(state, (0, 3), rng) == first

    def test_partial_register_value(self):
        state = basis_state(6, 0b110101)
        rng = np.random.default_rng(1)
        # register on qubits 2..4 reads bits (2,3,4) = 101
        assert measure_register(state, (2, 3, 4), rng) == 0b101

    def test_measurement_advances_clock(self):
        state = basis_state(2, 0)
        rng = np.random.default_rng(0)
        measure_register(state, (0, 1), rng)
        assert state.now == 10.0
        assert np.all(state.last_action == 10.0)


class TestTimingAndNoise:
    def test_schedule_timing(self):
        state = zero_state(3)
        run_circuit(state, [x(0), cnot(0, 1), x(2)])
        # layer 1: {X0, X2} duration 1; layer 2: CNOT duration 2
        assert state.now == 3.0
        assert state.last_action[0] == 3.0
        assert state.last_action[2] == 1.0

    def test_noise_off_equivalence(self):
        calm = NoiseParams(t1=math.inf, t2=math.inf)
        rng = np.random.default_rng(8)
        gates = random_gates(np.random.default_rng(5), 4, 25)
        a = zero_state(4)
        apply_gates_untimed(a, gates)
        b = zero_state(4)
        run_circuit(b, gates, noise=calm, rng=rng)
        assert np.abs(a.amps - b.amps).max() < 1e-12

    def test_noisy_needs_decomposition(self):
        noise = NoiseParams(t1=100.0, t2=100.0)
        state = zero_state(3)
        with pytest.raises(ValueError):
            apply_gate(state, mcx((0, 1), 2), noise, np.random.default_rng(0))

    def test_determinism(self):
        noise = NoiseParams(t1=40.0, t2=60.0)
        gates = random_gates(np.random.default_rng(12), 4, 30)

        def run(seed):
            state = zero_state(4)
            rng = np.random.default_rng(seed)
            run_circuit(state, gates, noise=noise, rng=rng)
            out = measure_register(state, (0, 1), rng)
            return out, state.amps.copy()

        o1, a1 = run(99)
        o2, a2 = run(99)
        assert o1 == o2
        assert np.array_equal(a1, a2)

    def test_error_applied_before_gate(self):
        from helpers import FixedNormals
        from gminlab.noise import error_rotation_matrix

        noise = NoiseParams(t1=4.0, t2=6.0)
        tau = 2.0
        sigma = np.sqrt(tau * noise.variance_rates())
        err = error_rotation_matrix(*(0.7 * sigma))
        state = zero_state(1)
        state.now = tau  # one idle interval before the gate
        run_circuit(state, [x(0)], noise=noise,
                    rng=FixedNormals(0.7, np.random.default_rng(0)))
        want = np.array([[0, 1], [1, 0]]) @ err @ np.array([1.0, 0.0])
        assert np.abs(state.amps - want).max() < 1e-12
        state = zero_state(2)
        run_circuit(state, [x(0), x(1)])
        before = state.now
        reinitialize(state, 0b10)
        assert state.now == before
        assert np.all(state.last_action == before)
        assert state.amps[0b10] == 1.0


class TestDump:
    def test_format_roundtrip(self):
        state = apply_gate(zero_state(2), h(0))
        text = dump_amplitudes(state)
        lines = text.strip().splitlines()
        assert len(lines) == 4
        idx, re_part, im_part = lines[1].split()
        assert int(idx) == 1
        assert float(re_part) == pytest.approx(1 / math.sqrt(2))
        assert float(im_part) == 0.0
