import math

import numpy as np
import pytest

from gminlab.gates import cnot, h, mcx, swap, x
from gminlab.noise import (
    MEASUREMENT_TIME,
    NoiseParams,
    derive_tphi,
    error_rotation_matrix,
    gate_duration,
    sample_error_unitary,
)

INF = math.inf


class TestDeriveTphi:
    def test_equal_times(self):
        assert derive_tphi(700.0, 700.0) == pytest.approx(1400.0)

    def test_infinite_t1(self):
        assert derive_tphi(INF, 350.0) == pytest.approx(350.0)

    def test_boundary_is_infinite(self):
        assert derive_tphi(500.0, 1000.0) == INF

    def test_rejects_unphysical(self):
        with pytest.raises(ValueError):
            derive_tphi(100.0, 300.0)
        with pytest.raises(ValueError):
            NoiseParams(t1=100.0, t2=1e9)

    def test_sweep_clamp(self):
        params = NoiseParams.single_axis_sweep(t1=100.0, t2=1e9)
        assert params.tphi == INF
        assert params.variance_rates()[1] == 0.0
        assert params.variance_rates()[2] == pytest.approx(0.5 / 1e9)


class TestErrorUnitary:
    def test_zero_elapsed_is_identity(self):
        params = NoiseParams(t1=50.0, t2=80.0)
        u = sample_error_unitary(0.0, params, np.random.default_rng(0))
        assert np.array_equal(u, np.eye(2))

    def test_infinite_times_identity(self):
        params = NoiseParams(t1=INF, t2=INF)
        u = sample_error_unitary(123.0, params, np.random.default_rng(1))
        assert np.array_equal(u, np.eye(2))

    def test_unitarity(self):
        params = NoiseParams(t1=3.0, t2=4.0)
        rng = np.random.default_rng(7)
        for _ in range(200):
            u = sample_error_unitary(rng.random() * 10, params, rng)
            assert np.abs(u @ u.conj().T - np.eye(2)).max() < 1e-12

    def test_matrix_matches_exponential(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            vx, vy, vz = rng.normal(size=3)
            X = np.array([[0, 1], [1, 0]])
            Y = np.array([[0, -1j], [1j, 0]])
            Z = np.array([[1, 0], [0, -1]])
            A = 1j * (vx * X + vy * Y + vz * Z)
            vals, vecs = np.linalg.eig(A)
            expm = vecs @ np.diag(np.exp(vals)) @ np.linalg.inv(vecs)
            assert np.abs(error_rotation_matrix(vx, vy, vz) - expm).max() < 1e-10

    def test_variance_linearity(self):
        """Var(vx) recovered from 1e5 sampled unitaries is tau/(2 T1) within 5%."""
        t1 = 12.0
        params = NoiseParams(t1=t1, t2=2 * t1)  # tphi = inf: vy is off
        rng = np.random.default_rng(5)
        tau = 3.0
        vx = np.empty(100_000)
        for i in range(len(vx)):
            u = sample_error_unitary(tau, params, rng)
            r = math.acos(min(1.0, max(-1.0, u[0, 0].real)))
            vx[i] = u[0, 1].imag / (math.sin(r) / r) if r > 0 else 0.0
        assert np.var(vx) == pytest.approx(tau / (2 * t1), rel=0.05)

    def test_survival_probability_against_quadrature(self):
        """Mean |<0|U|0>|^2 vs 2-D Gauss-Hermite integration of the channel."""
        t1 = 4.0
        params = NoiseParams(t1=t1, t2=2 * t1)  # vy off; vx, vz active
        tau = t1  # elapsed equal to the bit-flip time
        var_x = tau / (2 * t1)
        var_z = tau / (2 * params.t2)

        nodes, weights = np.polynomial.hermite_e.hermegauss(80)

        def survival(vx, vz):
            r = math.hypot(vx, vz)
            if r == 0:
                return 1.0
            s = math.sin(r) / r
            return math.cos(r) ** 2 + (vz * s) ** 2

        expect = 0.0
        for xi, wi in zip(nodes, weights):
            for zi, wz in zip(nodes, weights):
                expect += wi * wz * survival(xi * math.sqrt(var_x), zi * math.sqrt(var_z))
        expect /= 2 * math.pi

        rng = np.random.default_rng(21)
        n = 100_000
        hits = 0.0
        for _ in range(n):
            u = sample_error_unitary(tau, params, rng)
            hits += abs(u[0, 0]) ** 2
        mc = hits / n
        se = 0.25 / math.sqrt(n)  # conservative bound on the standard error
        assert abs(mc - expect) < 3 * se


class TestDurations:
    def test_table(self):
        assert gate_duration(h(0)) == 1.0
        assert gate_duration(x(0)) == 1.0
        assert gate_duration(cnot(0, 1)) == 2.0
        assert gate_duration(swap(0, 1)) == 2.0
        assert gate_duration("measure") == MEASUREMENT_TIME == 10.0

    def test_composites_rejected(self):
        with pytest.raises(ValueError):
            gate_duration(mcx((0, 1), 2))
