# ABOUTME: Tests for the keyed constructions, the 3XCE rewrite, the ELE view and oracle handles.
# ABOUTME: Checks round trips per scheme, closed-form equations, seeding and Q1/Q2 access rules.

import numpy as np
import pytest

from kle_workbench.cipher import Block, linear_ops
from kle_workbench.constructions import (
    AccessModel,
    ConstructionInstance,
    ConstructionSpec,
    OuterLayers,
    Scheme,
    build_instance,
    decrypt_construction,
    encrypt_construction,
    rewrite_3xce_as_g2kte,
)
from kle_workbench.errors import OracleAccessError, ParameterError
from kle_workbench.middle_layers import MiddleKind

BLOCKS = np.arange(256, dtype=np.uint64)

SCHEME_CASES = [
    (Scheme.TWO_KEY_TRIPLE, {}),
    (Scheme.TWO_KEY_TRIPLE_EDE, {}),
    (Scheme.GENERALIZED_TWO_KEY_TRIPLE, {}),
    (Scheme.THREE_XOR_CASCADE, {}),
    (Scheme.TILDE_THREE_XOR_CASCADE, {"middle_kind": MiddleKind.RANDOM_INVOLUTION}),
    (Scheme.TILDE_THREE_XOR_CASCADE, {"middle_kind": MiddleKind.P_TWISTED_INVOLUTION}),
    (Scheme.KARC, {}),
    (Scheme.GENERIC_ELE, {"middle_kind": MiddleKind.XOR}),
    (Scheme.GENERIC_ELE, {"middle_kind": MiddleKind.REFLECTION_AFFINE, "outer": OuterLayers.NO_E1}),
    (Scheme.GENERIC_ELE, {"middle_kind": MiddleKind.XOR, "outer": OuterLayers.NO_E2}),
]


class TestRoundTrip:
    @pytest.mark.parametrize("scheme,options", SCHEME_CASES)
    def test_decrypt_inverts_encrypt(self, make_instance, scheme, options):
        instance = make_instance(scheme, seed=21, **options)
        c = np.asarray(instance.encrypt(BLOCKS), dtype=np.uint64)
        assert len(np.unique(c)) == 256
        assert np.array_equal(np.asarray(instance.decrypt(c), dtype=np.uint64), BLOCKS)

    def test_block_wrappers(self, make_instance):
        instance = make_instance(Scheme.KARC, seed=3)
        c = encrypt_construction(instance, Block(0x41, 8))
        assert decrypt_construction(instance, c) == Block(0x41, 8)
        with pytest.raises(ParameterError):
            encrypt_construction(instance, Block(1, 9))


class TestEquations:
    def test_two_key_triple(self, make_instance):
        instance = make_instance(Scheme.TWO_KEY_TRIPLE, seed=5)
        (e,), (k1, k2) = instance.spec.ciphers, instance.secret_keys
        assert np.array_equal(instance.encrypt(BLOCKS), e.enc(k1, e.enc(k2, e.enc(k1, BLOCKS))))

    def test_ede_uses_middle_decryption(self, make_instance):
        instance = make_instance(Scheme.TWO_KEY_TRIPLE_EDE, seed=5)
        (e,), (k1, k2) = instance.spec.ciphers, instance.secret_keys
        assert np.array_equal(instance.encrypt(BLOCKS), e.enc(k1, e.dec(k2, e.enc(k1, BLOCKS))))

    def test_three_xor_cascade(self, make_instance):
        instance = make_instance(Scheme.THREE_XOR_CASCADE, seed=5)
        (e1, e2), (k, k1, k2) = instance.spec.ciphers, instance.secret_keys
        expected = e2.enc(k, e1.enc(k, BLOCKS ^ np.uint64(k1)) ^ np.uint64(k2)) ^ np.uint64(k1)
        assert np.array_equal(instance.encrypt(BLOCKS), expected)

    def test_karc(self, make_instance):
        instance = make_instance(Scheme.KARC, seed=5)
        spec = instance.spec
        (e,), (k, k1, k2) = spec.ciphers, instance.secret_keys
        ops = linear_ops(8)
        inner = ops.reflect(e.enc(k, BLOCKS ^ np.uint64(k1)) ^ np.uint64(k2)) ^ np.uint64(ops.sigma(k2))
        expected = e.dec(k ^ spec.alpha, inner) ^ np.uint64(ops.sigma(k1))
        assert np.array_equal(instance.encrypt(BLOCKS), expected)

    def test_karc_golden_ciphertexts(self):
        # Cipher id 1, alpha truncated to 0x5A, default 10-round Feistel.
        spec = ConstructionSpec(scheme=Scheme.KARC, kappa=8, n=8, cipher_ids=(1,))
        instance = ConstructionInstance(spec=spec, secret_keys=(0x3C, 0x15, 0xA7), seed=0)
        assert [instance.encrypt(m) for m in range(4)] == [0x80, 0xB3, 0x2E, 0x58]
        assert instance.encrypt(0x5B) == 0x69
        assert instance.decrypt(0x69) == 0x5B
        view = spec.ele_view()
        z = view.outer_key(instance.secret_keys)
        ops = linear_ops(8)
        a, b = view.a_of(z, 0x00), view.b_of(z, 0x80)
        assert b ^ ops.reflect(a) == ops.reflect(0xA7) ^ ops.sigma(0xA7)

    def test_ele_without_first_layer(self, make_instance):
        instance = make_instance(Scheme.GENERIC_ELE, seed=5, middle_kind=MiddleKind.XOR, outer=OuterLayers.NO_E1)
        (_, e2), (k, k2) = instance.spec.ciphers, instance.secret_keys
        assert np.array_equal(instance.encrypt(BLOCKS), e2.enc(k, BLOCKS ^ np.uint64(k2)))

    def test_rewrite_composes_to_3xce(self, make_instance):
        instance = make_instance(Scheme.THREE_XOR_CASCADE, seed=8)
        k, k1, k2 = instance.secret_keys
        rewrite = rewrite_3xce_as_g2kte(instance)
        z = (k << 8) | k1
        assert np.array_equal(rewrite.compose(z, k2, BLOCKS), instance.encrypt(BLOCKS))
        inner = rewrite.e1.forward(z, BLOCKS)
        assert np.array_equal(rewrite.e1.inverse(z, inner), BLOCKS)

    def test_rewrite_needs_3xce(self, make_instance):
        with pytest.raises(ParameterError):
            rewrite_3xce_as_g2kte(make_instance(Scheme.KARC))


class TestEleView:
    @pytest.mark.parametrize(
        "scheme,options",
        [case for case in SCHEME_CASES if case[0] not in (
            Scheme.TWO_KEY_TRIPLE, Scheme.TWO_KEY_TRIPLE_EDE, Scheme.GENERALIZED_TWO_KEY_TRIPLE)],
    )
    def test_true_outer_key_exposes_the_middle_layer(self, make_instance, scheme, options):
        instance = make_instance(scheme, seed=13, **options)
        view = instance.spec.ele_view()
        keys = instance.secret_keys
        z = view.outer_key(keys)
        c = instance.encrypt(BLOCKS)
        a = view.a_of(np.uint64(z), BLOCKS)
        b = view.b_of(np.uint64(z), c)
        assert np.array_equal(view.family.apply(keys[-1], a), b)
        assert view.assemble(z, keys[-1]) == keys

    def test_two_key_schemes_have_no_view(self, make_instance):
        with pytest.raises(ParameterError):
            make_instance(Scheme.TWO_KEY_TRIPLE).spec.ele_view()


class TestConstructionSpec:
    def test_key_slots_and_bits(self, make_instance):
        assert make_instance(Scheme.TWO_KEY_TRIPLE, 10, 8).spec.key_bits == 20
        assert make_instance(Scheme.THREE_XOR_CASCADE, 10, 8).spec.key_bits == 26
        slots = make_instance(Scheme.GENERIC_ELE, 10, 8, middle_kind=MiddleKind.XOR).spec.key_slots
        assert [(s.name, s.width) for s in slots] == [("K1", 10), ("K2", 8)]

    def test_split_key_index_puts_first_slot_high(self, make_instance):
        spec = make_instance(Scheme.THREE_XOR_CASCADE, 8, 8).spec
        assert spec.split_key_index((0x12 << 16) | (0x34 << 8) | 0x56) == (0x12, 0x34, 0x56)

    def test_wrong_cipher_count_rejected(self):
        with pytest.raises(ParameterError):
            ConstructionSpec(Scheme.GENERALIZED_TWO_KEY_TRIPLE, 8, 8, (1, 2))

    def test_tilde_needs_middle_kind(self):
        with pytest.raises(ParameterError):
            ConstructionSpec(Scheme.TILDE_THREE_XOR_CASCADE, 8, 8, (1, 2))

    def test_fixed_middle_schemes_reject_middle_kind(self):
        with pytest.raises(ParameterError):
            ConstructionSpec(Scheme.THREE_XOR_CASCADE, 8, 8, (1, 2), middle_kind=MiddleKind.XOR)

    def test_outer_options_only_for_ele(self):
        with pytest.raises(ParameterError):
            ConstructionSpec(Scheme.THREE_XOR_CASCADE, 8, 8, (1, 2), outer=OuterLayers.NO_E1)

    def test_key_out_of_range_rejected(self, make_instance):
        spec = make_instance(Scheme.TWO_KEY_TRIPLE).spec
        with pytest.raises(ParameterError):
            ConstructionInstance(spec, (0, 256), seed=0)

    def test_label_includes_middle_kind(self, make_instance):
        instance = make_instance(Scheme.TILDE_THREE_XOR_CASCADE, middle_kind=MiddleKind.RANDOM_INVOLUTION)
        assert instance.spec.label == "3xce-tilde[random_involution]"


class TestBuildInstance:
    def test_same_seed_same_instance(self):
        a = build_instance(Scheme.THREE_XOR_CASCADE, 8, 8, 99)
        b = build_instance(Scheme.THREE_XOR_CASCADE, 8, 8, 99)
        assert a == b

    def test_different_seeds_differ(self):
        a = build_instance(Scheme.THREE_XOR_CASCADE, 8, 8, 1)
        b = build_instance(Scheme.THREE_XOR_CASCADE, 8, 8, 2)
        assert a.spec.cipher_ids != b.spec.cipher_ids

    def test_share_ciphers_reuses_one_id(self):
        instance = build_instance(Scheme.GENERALIZED_TWO_KEY_TRIPLE, 8, 8, 4, share_ciphers=True)
        assert len(set(instance.spec.cipher_ids)) == 1

    def test_explicit_keys(self):
        instance = build_instance(Scheme.TWO_KEY_TRIPLE, 8, 8, 4, keys=(1, 2))
        assert instance.named_keys() == {"k1": 1, "k2": 2}


class TestOracleHandle:
    def test_classical_queries_are_counted(self, make_instance, make_handle, ledger):
        handle = make_handle(make_instance(Scheme.THREE_XOR_CASCADE), AccessModel.Q1)
        handle.encrypt(np.arange(5, dtype=np.uint64))
        handle.decrypt(7)
        assert ledger.get("construction_queries_classical") == 6

    def test_q1_handle_refuses_queries_inside_a_predicate(self, make_instance, make_handle):
        handle = make_handle(make_instance(Scheme.THREE_XOR_CASCADE), AccessModel.Q1)
        with handle.predicate_scope():
            with pytest.raises(OracleAccessError):
                handle.encrypt(1)
        assert handle.encrypt(1) == handle.instance.encrypt(1)

    def test_q2_handle_answers_inside_a_predicate_without_classical_charge(
        self, make_instance, make_handle, ledger
    ):
        instance = make_instance(Scheme.THREE_XOR_CASCADE)
        handle = make_handle(instance, AccessModel.Q2)
        with handle.predicate_scope():
            assert handle.in_predicate
            assert np.array_equal(handle.encrypt(BLOCKS), instance.encrypt(BLOCKS))
        assert not handle.in_predicate
        assert ledger.get("construction_queries_classical") == 0
