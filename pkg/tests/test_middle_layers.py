# ABOUTME: Tests for the keyed middle-layer families: XOR, reflection-affine and tabulated involutions.
# ABOUTME: Checks permutation and involution properties, consistent-key recovery and table budgets.

import numpy as np
import pytest

from kle_workbench.cipher import Key, linear_ops
from kle_workbench.errors import ParameterError, ResourceError
from kle_workbench.middle_layers import MiddleKind, middle_family, middle_layer

ALL_KINDS = list(MiddleKind)


class TestPermutations:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_every_member_is_a_permutation_with_inverse(self, kind):
        family = middle_family(kind, 6, layer_seed=9)
        xs = np.arange(64, dtype=np.uint64)
        for k2 in (0, 17, 63):
            image = np.asarray(family.apply(k2, xs), dtype=np.uint64)
            assert len(np.unique(image)) == 64
            assert np.array_equal(np.asarray(family.invert(k2, image), dtype=np.uint64), xs)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_scalar_application_returns_int(self, kind):
        family = middle_family(kind, 8, layer_seed=2)
        y = family.apply(5, 7)
        assert isinstance(y, int)
        assert family.invert(5, y) == 7


class TestInvolutions:
    def test_xor_family_is_an_involution(self):
        family = middle_family(MiddleKind.XOR, 8)
        assert linear_ops(8).involution_check(lambda x: family.apply(0x3C, x))

    def test_random_involution_has_no_fixed_points(self):
        family = middle_family(MiddleKind.RANDOM_INVOLUTION, 8, layer_seed=4)
        xs = np.arange(256, dtype=np.uint64)
        for k2 in (0, 1, 200):
            image = family.apply(k2, xs)
            assert np.array_equal(family.apply(k2, image), xs)
            assert not np.any(image == xs)

    def test_p_twisted_satisfies_l_p_l_identity(self):
        family = middle_family(MiddleKind.P_TWISTED_INVOLUTION, 8, layer_seed=4)
        p = family.public_p
        xs = np.arange(256, dtype=np.uint64)
        assert np.array_equal(p[p], np.arange(256))
        for k2 in (0, 3, 255):
            once = family.apply(k2, xs)
            assert np.array_equal(family.apply(k2, p[once.astype(np.intp)]), xs)
            assert not np.array_equal(family.apply(k2, once), xs)

    def test_public_p_is_key_independent_and_absent_elsewhere(self):
        twisted = middle_family(MiddleKind.P_TWISTED_INVOLUTION, 6, layer_seed=1)
        assert twisted.public_p is not None
        assert middle_family(MiddleKind.RANDOM_INVOLUTION, 6, layer_seed=1).public_p is None
        assert middle_family(MiddleKind.XOR, 6).public_p is None

    def test_layer_seed_changes_the_family(self):
        a = middle_family(MiddleKind.RANDOM_INVOLUTION, 8, layer_seed=1).forward_table(0)
        b = middle_family(MiddleKind.RANDOM_INVOLUTION, 8, layer_seed=2).forward_table(0)
        assert not np.array_equal(a, b)


class TestReflectionAffine:
    def test_matches_definition(self):
        ops = linear_ops(8)
        family = middle_family(MiddleKind.REFLECTION_AFFINE, 8)
        for k2, x in [(0, 0), (0x12, 0x34), (0xFF, 0x01)]:
            assert family.apply(k2, x) == ops.reflect(x ^ k2) ^ ops.sigma(k2)

    def test_output_minus_reflected_input_is_key_constant(self):
        ops = linear_ops(8)
        family = middle_family(MiddleKind.REFLECTION_AFFINE, 8)
        xs = np.arange(256, dtype=np.uint64)
        diff = family.apply(0x5D, xs) ^ ops.reflect(xs)
        assert np.all(diff == family.key_constant(0x5D))


class TestConsistentKeys:
    def test_xor_recovers_the_key(self):
        family = middle_family(MiddleKind.XOR, 8)
        a = np.array([1, 2, 3], dtype=np.uint64)
        assert list(family.consistent_keys(a, a ^ np.uint64(0x42))) == [0x42]

    def test_xor_inconsistent_pairs_give_nothing(self):
        family = middle_family(MiddleKind.XOR, 8)
        assert family.consistent_keys([1, 2], [3, 7]).size == 0

    def test_reflection_returns_every_equivalent_key(self):
        family = middle_family(MiddleKind.REFLECTION_AFFINE, 8)
        a = np.array([3, 9, 100], dtype=np.uint64)
        keys = family.consistent_keys(a, family.apply(0x77, a))
        assert 0x77 in keys
        assert np.all(family.key_constant(keys) == family.key_constant(0x77))

    @pytest.mark.parametrize("kind", [MiddleKind.RANDOM_INVOLUTION, MiddleKind.P_TWISTED_INVOLUTION])
    def test_tabulated_recovers_the_key(self, kind):
        family = middle_family(kind, 8, layer_seed=6)
        a = np.array([1, 2, 3, 4], dtype=np.uint64)
        assert list(family.consistent_keys(a, family.apply(0xA1, a))) == [0xA1]

    def test_tabulation_beyond_budget_raises(self):
        family = middle_family(MiddleKind.RANDOM_INVOLUTION, 12)
        with pytest.raises(ResourceError):
            family.all_keys_table()
        assert family.apply(7, 100) != 100


class TestConstruction:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ParameterError):
            middle_family("rotation", 8)

    def test_middle_layer_binds_key(self):
        layer = middle_layer(MiddleKind.XOR, Key(0x0F, 8))
        assert layer(0xF0) == 0xFF
        assert layer.inverse(0xFF) == 0xF0
        assert layer.public_p is None
