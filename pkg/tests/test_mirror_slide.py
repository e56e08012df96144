# ABOUTME: Tests for the mirror-slide attacks on tilde-3XCE in the Q1 and Q2 (plain and P-twisted) models.
# ABOUTME: Ties Q1 success to ground-truth slid pairs and checks the online slid states under true keys.

import numpy as np

from kle_workbench.attacks.common import distinct_plaintexts
from kle_workbench.attacks.mirror_slide import mirror_data_size
from kle_workbench.constructions import Scheme, build_instance
from kle_workbench.groundtruth import enumerate_mirror_pairs
from kle_workbench.middle_layers import MiddleKind
from kle_workbench.models import ExperimentConfig
from kle_workbench.oracle_functions import plaintext_constants
from kle_workbench.runner import run_attack


def attack(attack_id, seed, **fields):
    return run_attack(ExperimentConfig(attack=attack_id, seed=seed, **fields))


def recovered(report):
    return tuple(int(value, 16) for value in report.recovered_keys.values())


def tilde(seed, middle=MiddleKind.RANDOM_INVOLUTION):
    return build_instance(Scheme.TILDE_THREE_XOR_CASCADE, 8, 8, seed, middle_kind=middle)


def slid_states(instance, consts):
    """a_i and b_i computed with the true (k, k1)."""
    k, k1, _ = instance.secret_keys
    e1, e2 = instance.spec.ciphers
    a = e2.dec(k, np.asarray(instance.encrypt(e1.dec(k, consts) ^ np.uint64(k1)), dtype=np.uint64) ^ np.uint64(k1))
    b = e1.enc(k, np.asarray(instance.decrypt(e2.enc(k, consts) ^ np.uint64(k1)), dtype=np.uint64) ^ np.uint64(k1))
    return a, b


class TestSlidStates:
    def test_involution_makes_states_agree(self):
        consts = plaintext_constants(4, 8)
        for seed in range(20):
            instance = tilde(seed)
            a, b = slid_states(instance, consts)
            assert np.array_equal(a, b)
            assert np.array_equal(a, instance.spec.middle.apply(instance.secret_keys[2], consts))

    def test_p_twisted_states_agree_through_p(self):
        consts = plaintext_constants(4, 8)
        for seed in range(20):
            instance = tilde(seed, MiddleKind.P_TWISTED_INVOLUTION)
            a, b = slid_states(instance, consts)
            p = instance.spec.middle.public_p
            assert np.array_equal(p[a.astype(np.intp)], b)
            assert not np.array_equal(a, b)


class TestMirrorSlideQ2:
    def test_recovers_keys(self):
        successes = 0
        for seed in range(200):
            report = attack("mirror-slide-q2", seed)
            if report.success:
                successes += 1
                assert recovered(report) == tilde(seed).secret_keys
        assert successes >= 190

    def test_p_twisted_variant(self):
        successes = 0
        for seed in range(200):
            report = attack("mirror-slide-q2-p", seed)
            if report.success:
                successes += 1
                assert recovered(report) == tilde(seed, MiddleKind.P_TWISTED_INVOLUTION).secret_keys
        assert successes >= 190
        assert report.middle == "p_twisted_involution"

    def test_xor_middle_is_accepted(self):
        report = attack("mirror-slide-q2", 3, middle_kind="xor")
        assert report.success
        assert report.middle == "xor"

    def test_costs(self):
        report = attack("mirror-slide-q2", 1)
        assert report.t == 4
        assert report.predicted.time_exponent == "8"
        assert report.predicted.time_factor == 4
        assert report.ledger["construction_queries_superposition"] >= 8 * 202


class TestMirrorSlideQ1:
    def test_data_size(self):
        assert mirror_data_size(8) == 23
        assert mirror_data_size(7) == 16

    def test_reports_worse_than_bruteforce(self):
        report = attack("mirror-slide-q1", 0)
        assert report.t == 23
        assert report.predicted.time_exponent == "16"
        assert report.predicted.worse_than_bruteforce
        assert report.predicted.time_factor == 529
        assert report.ledger["construction_queries_superposition"] == 0

    def test_success_iff_data_holds_a_slid_pair(self):
        for seed in range(60):
            report = attack("mirror-slide-q1", seed)
            plaintexts = distinct_plaintexts(np.random.default_rng([seed, 1]), 8, 23)
            scan = enumerate_mirror_pairs(tilde(seed), plaintexts)
            assert report.success == bool(scan.pairs)
            if report.success:
                assert recovered(report) == tilde(seed).secret_keys

    def test_slid_pair_existence_rate(self):
        found = 0
        for seed in range(500):
            plaintexts = distinct_plaintexts(np.random.default_rng([seed, 1]), 8, 23)
            found += int(bool(enumerate_mirror_pairs(tilde(seed), plaintexts).pairs))
        assert found / 500 >= 0.55
