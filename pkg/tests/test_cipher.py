# ABOUTME: Tests for the seeded toy block cipher and the linear maps sigma and R.
# ABOUTME: Covers exact inversion, golden values, avalanche and collision statistics, broadcasting and width checks.

import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from kle_workbench.cipher import (
    Block,
    CipherParams,
    Key,
    ToyCipher,
    decrypt,
    encrypt,
    linear_ops,
    toy_cipher,
)
from kle_workbench.errors import ParameterError

ROOT = Path(__file__).resolve().parent.parent


class TestPermutation:
    @pytest.mark.parametrize("kappa,n", [(8, 8), (12, 10), (10, 7), (5, 3), (12, 12)])
    def test_encrypt_is_a_bijection_for_every_key(self, kappa, n):
        cipher = toy_cipher(CipherParams(kappa, n, 77))
        blocks = np.arange(1 << n, dtype=np.uint64)
        for start in range(0, 1 << kappa, 512):
            keys = np.arange(start, min(start + 512, 1 << kappa), dtype=np.uint64)[:, None]
            image = np.sort(cipher.enc(keys, blocks[None, :]), axis=1)
            assert np.array_equal(image, np.broadcast_to(blocks, image.shape))

    def test_round_trip_exhaustive_over_twenty_cipher_ids(self):
        keys = np.arange(256, dtype=np.uint64)[:, None]
        blocks = np.arange(256, dtype=np.uint64)[None, :]
        for cipher_id in range(1, 21):
            cipher = toy_cipher(CipherParams(8, 8, cipher_id))
            assert np.array_equal(cipher.dec(keys, cipher.enc(keys, blocks)), np.broadcast_to(blocks, (256, 256)))

    def test_golden_ciphertext(self):
        # Regression anchor for the default 10-round Feistel.
        assert encrypt(CipherParams(8, 8, 1), Key(0x2A, 8), Block(0x00, 8)) == Block(0xF5, 8)

    def test_multiset_of_outputs_is_every_block(self):
        cipher = toy_cipher(CipherParams(8, 8, 1))
        image = cipher.enc(0x2A, np.arange(256, dtype=np.uint64))
        assert sorted(int(v) for v in image) == list(range(256))

    @pytest.mark.parametrize("n", [3, 7, 8, 13, 24])
    def test_decrypt_inverts_encrypt(self, n):
        cipher = toy_cipher(CipherParams(10, n, 3))
        rng = np.random.default_rng(n)
        keys = rng.integers(0, 1 << 10, size=500, dtype=np.uint64)
        blocks = rng.integers(0, 1 << n, size=500, dtype=np.uint64)
        assert np.array_equal(cipher.dec(keys, cipher.enc(keys, blocks)), blocks)
        assert np.array_equal(cipher.enc(keys, cipher.dec(keys, blocks)), blocks)

    def test_different_cipher_ids_give_different_permutations(self):
        blocks = np.arange(256, dtype=np.uint64)
        a = toy_cipher(CipherParams(8, 8, 1)).enc(9, blocks)
        b = toy_cipher(CipherParams(8, 8, 2)).enc(9, blocks)
        assert not np.array_equal(a, b)

    def test_different_keys_give_different_permutations(self):
        cipher = toy_cipher(CipherParams(8, 8, 1))
        blocks = np.arange(256, dtype=np.uint64)
        assert not np.array_equal(cipher.enc(1, blocks), cipher.enc(2, blocks))


class TestBroadcasting:
    def test_scalar_arguments_return_int(self):
        cipher = toy_cipher(CipherParams(8, 8, 5))
        out = cipher.enc(3, 4)
        assert isinstance(out, int)
        assert cipher.dec(3, out) == 4

    def test_key_column_against_block_row_gives_matrix(self):
        cipher = toy_cipher(CipherParams(8, 8, 5))
        keys = np.arange(6, dtype=np.uint64)[:, None]
        blocks = np.arange(4, dtype=np.uint64)[None, :]
        out = cipher.enc(keys, blocks)
        assert out.shape == (6, 4)
        assert out[2, 3] == cipher.enc(2, 3)


class TestTypedWrappers:
    def test_encrypt_decrypt_blocks(self):
        params = CipherParams(8, 8, 11)
        c = encrypt(params, Key(0x2A, 8), Block(0x10, 8))
        assert c.width == 8
        assert decrypt(params, Key(0x2A, 8), c) == Block(0x10, 8)

    def test_wrong_key_width_rejected(self):
        with pytest.raises(ParameterError):
            encrypt(CipherParams(8, 8, 1), Key(1, 9), Block(0, 8))

    def test_wrong_block_width_rejected(self):
        with pytest.raises(ParameterError):
            decrypt(CipherParams(8, 8, 1), Key(1, 8), Block(0, 7))

    def test_block_value_must_fit_width(self):
        with pytest.raises(ParameterError):
            Block(256, 8)

    @pytest.mark.parametrize("kappa,n", [(2, 8), (8, 2), (25, 8), (8, 25)])
    def test_params_outside_range_rejected(self, kappa, n):
        with pytest.raises(ParameterError):
            CipherParams(kappa, n, 0)

    def test_too_few_rounds_rejected(self):
        with pytest.raises(ParameterError):
            ToyCipher(CipherParams(8, 8, 0), rounds=4)


class TestDeterminism:
    def test_same_params_same_output_across_processes(self):
        code = (
            "from kle_workbench.cipher import *;"
            "print(encrypt(CipherParams(8, 8, 12345), Key(0x2A, 8), Block(0x3C, 8)).value)"
        )
        env = {**os.environ, "PYTHONHASHSEED": "977"}
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, check=True, cwd=ROOT, env=env
        )
        expected = encrypt(CipherParams(8, 8, 12345), Key(0x2A, 8), Block(0x3C, 8)).value
        assert int(out.stdout.strip()) == expected


class TestLinearOps:
    @pytest.mark.parametrize("n", [3, 8, 11])
    def test_sigma_inverse(self, n):
        ops = linear_ops(n)
        xs = np.arange(1 << n, dtype=np.uint64)
        assert np.array_equal(ops.sigma_inv(ops.sigma(xs)), xs)
        assert ops.sigma(0b1) == 0b10
        assert ops.sigma(1 << (n - 1)) == 1

    @pytest.mark.parametrize("n", [3, 8, 11])
    def test_reflect_is_an_involution(self, n):
        ops = linear_ops(n)
        assert ops.involution_check(ops.reflect)
        assert ops.reflect(1) == 1 << (n - 1)

    def test_sigma_is_not_an_involution(self):
        ops = linear_ops(8)
        assert not ops.involution_check(ops.sigma)

    def test_reflect_is_linear_over_xor(self):
        ops = linear_ops(8)
        rng = np.random.default_rng(0)
        x, y = rng.integers(0, 256, size=(2, 100), dtype=np.uint64)
        assert np.array_equal(ops.reflect(x ^ y), ops.reflect(x) ^ ops.reflect(y))


class TestRandomness:
    """Exhaustive statistics at kappa = n = 8; the counts are deterministic."""

    KEYS = np.arange(256, dtype=np.uint64)[:, None]
    BLOCKS = np.arange(256, dtype=np.uint64)[None, :]

    @staticmethod
    def _flipped_bit_fraction(a, b):
        diff = np.asarray(a ^ b, dtype=np.uint8)
        return np.unpackbits(diff[..., None], axis=-1).mean()

    def test_key_bit_avalanche(self):
        cipher = toy_cipher(CipherParams(8, 8, 1))
        out = cipher.enc(self.KEYS, self.BLOCKS)
        fractions = [
            self._flipped_bit_fraction(out, cipher.enc(self.KEYS ^ np.uint64(1 << bit), self.BLOCKS))
            for bit in range(8)
        ]
        assert np.mean(fractions) >= 0.30
        assert min(fractions) >= 0.30

    def test_block_bit_avalanche(self):
        cipher = toy_cipher(CipherParams(8, 8, 1))
        out = cipher.enc(self.KEYS, self.BLOCKS)
        fractions = [
            self._flipped_bit_fraction(out, cipher.enc(self.KEYS, self.BLOCKS ^ np.uint64(1 << bit)))
            for bit in range(8)
        ]
        assert np.mean(fractions) >= 0.30

    def test_cipher_ids_collide_at_the_random_permutation_rate(self):
        matches = 0
        for cipher_id in range(1, 20):
            a = toy_cipher(CipherParams(8, 8, cipher_id)).enc(self.KEYS, self.BLOCKS)
            b = toy_cipher(CipherParams(8, 8, cipher_id + 1)).enc(self.KEYS, self.BLOCKS)
            matches += int(np.count_nonzero(a == b))
        rate = matches / (19 * 256 * 256)
        assert 0.5 * 2**-8 <= rate <= 1.5 * 2**-8

    @pytest.mark.parametrize("wrong", [lambda k: k ^ np.uint64(1), lambda k: (k + np.uint64(1)) & np.uint64(0xFF)])
    def test_wrong_key_rarely_recovers_the_plaintext(self, wrong):
        cipher = toy_cipher(CipherParams(8, 8, 1))
        ciphertexts = cipher.enc(self.KEYS, self.BLOCKS)
        recovered = cipher.dec(wrong(self.KEYS), ciphertexts)
        rate = np.count_nonzero(recovered == self.BLOCKS) / (256 * 256)
        assert 0.5 * 2**-8 <= rate <= 2 * 2**-8
