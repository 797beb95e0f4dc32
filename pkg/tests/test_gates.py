import pytest
from hypothesis import given
from hypothesis import strategies as st

from gminlab.gates import (
    GateOp,
    cnot,
    cp,
    cz,
    dump_circuit,
    h,
    mcx,
    mcz,
    p,
    parse_circuit,
    schedule,
    swap,
    x,
    z,
)


class TestGateOp:
    def test_durations(self):
        assert x(0).duration == 1.0
        assert h(2).duration == 1.0
        assert cnot(0, 1).duration == 2.0
        assert swap(1, 2).duration == 2.0
        assert mcx((0, 1), 2).duration is None
        assert mcz((0, 1, 2)).duration is None

    def test_builders_collapse_small_cases(self):
        assert mcx((3,), 1) == cnot(3, 1)
        assert mcz((4,)) == z(4)
        assert mcz((2, 5)) == cz(2, 5)

    def test_validation(self):
        with pytest.raises(ValueError):
            GateOp("X", (0, 1))
        with pytest.raises(ValueError):
            GateOp("CNOT", (1,), (1,))
        with pytest.raises(ValueError):
            GateOp("BAD", (0,))

    def test_dump_parse_roundtrip(self):
        gates = [x(0), h(3), p(0.25, 1), cnot(0, 2), cp(-0.5, 1, 4),
                 swap(2, 3), mcx((0, 1, 2), 5), mcz((1, 2, 6))]
        assert parse_circuit(dump_circuit(gates)) == gates


class TestSchedule:
    def test_disjoint_single_layer(self):
        s = schedule([x(0), x(1)])
        assert len(s.layers) == 1
        assert s.total_duration == 1.0

    def test_overlap_two_layers(self):
        s = schedule([x(0), cnot(0, 1)])
        assert len(s.layers) == 2
        assert s.total_duration == 3.0

    def test_layer_duration_is_max(self):
        s = schedule([cnot(0, 1), x(2), x(3)])
        assert len(s.layers) == 1
        assert s.total_duration == 2.0

    def test_rejects_composites(self):
        with pytest.raises(ValueError):
            schedule([mcx((0, 1), 2)])

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=30))
    def test_layers_have_disjoint_support(self, pairs):
        gates = [cnot(a, b) if a != b else x(a) for a, b in pairs]
        s = schedule(gates)
        for layer in s.layers:
            seen = set()
            for g in layer:
                assert not (set(g.support) & seen)
                seen.update(g.support)
        assert sum(len(layer) for layer in s.layers) == len(gates)
        assert s.total_duration == sum(s.durations)
        for layer, duration in zip(s.layers, s.durations):
            assert duration == max(g.duration for g in layer)

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=30))
    def test_order_preserved_per_qubit(self, pairs):
        gates = [cnot(a, b) if a != b else x(a) for a, b in pairs]
        s = schedule(gates)
        flat = [g for layer in s.layers for g in layer]
        for q in range(6):
            mine = [g for g in gates if q in g.support]
            theirs = [g for g in flat if q in g.support]
            assert mine == theirs
