import pytest
from hypothesis import given
from hypothesis import strategies as st

from gminlab.groups import (
    CapacityError,
    GroupSpec,
    ProblemInstance,
    build_lookup,
    group_apply,
    orbit_on_the_fly,
)


def add_instance(n):
    return ProblemInstance(GroupSpec.add_mod(1 << n), n)


def spin_instance(sites):
    return ProblemInstance(GroupSpec.spin_translation(sites), sites)


class TestGroupApply:
    def test_add_mod(self):
        spec = GroupSpec.add_mod(16)
        assert group_apply(spec, 3, 5) == 8
        assert group_apply(spec, 15, 1) == 0

    def test_spin_rotation_direction(self):
        # one shift moves bits toward the less significant end
        spec = GroupSpec.spin_translation(4)
        assert group_apply(spec, 1, 0b0110) == 0b0011
        # full orbit of v=6 under repeated shifts
        orbit = [group_apply(spec, x, 6) for x in range(4)]
        assert orbit == [6, 3, 9, 12]

    def test_range_errors(self):
        spec = GroupSpec.add_mod(8)
        with pytest.raises(ValueError):
            group_apply(spec, 8, 0)
        with pytest.raises(ValueError):
            group_apply(spec, 0, 8)

    def test_identity_element(self):
        for inst in (add_instance(3), spin_instance(4)):
            for v in range(inst.n_values):
                assert group_apply(inst.group, 0, v, inst.n_position_bits) == v

    @given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
    def test_abelian_action_composition(self, x1, x2, v):
        spec = GroupSpec.add_mod(16)
        lhs = group_apply(spec, x2, group_apply(spec, x1, v))
        assert lhs == group_apply(spec, (x1 + x2) % 16, v)

    @given(st.sampled_from([2, 4, 8]), st.data())
    def test_spin_composition(self, sites, data):
        spec = GroupSpec.spin_translation(sites)
        x1 = data.draw(st.integers(0, sites - 1))
        x2 = data.draw(st.integers(0, sites - 1))
        v = data.draw(st.integers(0, (1 << sites) - 1))
        lhs = group_apply(spec, x2, group_apply(spec, x1, v))
        assert lhs == group_apply(spec, (x1 + x2) % sites, v)

    def test_action_is_bijective(self):
        for inst in (add_instance(4), spin_instance(4)):
            for x in range(inst.group.size):
                image = {group_apply(inst.group, x, v, inst.n_position_bits)
                         for v in range(inst.n_values)}
                assert len(image) == inst.n_values


class TestOrbits:
    def test_add_examples(self):
        inst = add_instance(4)
        res = orbit_on_the_fly(inst, 5)
        assert (res.v_rep, res.x_rep) == (0, 11)
        res = orbit_on_the_fly(inst, 0)
        assert (res.v_rep, res.x_rep) == (0, 0)

    def test_spin_example(self):
        inst = spin_instance(4)
        res = orbit_on_the_fly(inst, 6)
        assert res.v_rep == 3
        assert group_apply(inst.group, res.x_rep, 6) == 3
        assert res.orbit_size == 4

    def test_connecting_element_and_tiebreak(self):
        inst = spin_instance(8)
        for v in range(256):
            res = orbit_on_the_fly(inst, v)
            assert group_apply(inst.group, res.x_rep, v) == res.v_rep
            # smallest connecting index
            for x in range(res.x_rep):
                assert group_apply(inst.group, x, v) != res.v_rep

    def test_minimality_exhaustive(self):
        inst = spin_instance(6)
        for v in range(64):
            res = orbit_on_the_fly(inst, v)
            orbit = {group_apply(inst.group, x, v) for x in range(6)}
            assert res.v_rep == min(orbit)
            assert res.orbit_size == len(orbit)


class TestLookup:
    def test_single_orbit_for_addition(self):
        table = build_lookup(add_instance(3))
        assert len(table) == 8
        assert all(table[v].v_rep == 0 for v in range(8))

    def test_spin_representative_set(self):
        table = build_lookup(spin_instance(4))
        # brute force: 6 orbits of the 4-site ring
        reps = sorted({orbit_on_the_fly(spin_instance(4), v).v_rep for v in range(16)})
        assert list(table.representatives()) == reps == [0, 1, 3, 5, 7, 15]

    def test_agrees_with_on_the_fly(self):
        for inst in (add_instance(5), spin_instance(8)):
            table = build_lookup(inst)
            for v in range(inst.n_values):
                res = orbit_on_the_fly(inst, v)
                assert table[v] == res

    def test_orbit_partition(self):
        inst = spin_instance(8)
        table = build_lookup(inst)
        sizes = {}
        for v in range(256):
            sizes.setdefault(table[v].v_rep, 0)
            sizes[table[v].v_rep] += 1
        assert sum(sizes.values()) == 256
        for v in range(256):
            assert sizes[table[v].v_rep] == table[v].orbit_size

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            build_lookup(add_instance(10), max_positions=512)

    def test_two_generator_brute_force(self):
        n = 4
        rot = tuple((v >> 1) | ((v & 1) << (n - 1)) for v in range(16))
        flip = tuple(v ^ 1 for v in range(16))
        spec = GroupSpec.two_generator(rot, flip)
        inst = ProblemInstance(spec, n)
        table = build_lookup(inst)
        for v in range(16):
            res = orbit_on_the_fly(inst, v)
            assert table[v] == res
            assert group_apply(spec, res.x_rep, v) == res.v_rep
            orbit = {group_apply(spec, x, v) for x in range(spec.size)}
            assert res.v_rep == min(orbit)


class TestSpecValidation:
    def test_add_needs_power_of_two(self):
        with pytest.raises(ValueError):
            GroupSpec.add_mod(12)

    def test_index_bits_requires_power_of_two(self):
        spec = GroupSpec.spin_translation(6)
        with pytest.raises(ValueError):
            _ = spec.index_bits
        assert GroupSpec.spin_translation(8).index_bits == 3

    def test_generator_must_be_permutation(self):
        with pytest.raises(ValueError):
            GroupSpec.single_cycle((0, 0, 1, 2))

    def test_instance_compatibility(self):
        with pytest.raises(ValueError):
            ProblemInstance(GroupSpec.add_mod(16), 3)
        with pytest.raises(ValueError):
            ProblemInstance(GroupSpec.spin_translation(4), 5)
