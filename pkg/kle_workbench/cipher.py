# ABOUTME: Seeded toy block ciphers E: {0,1}^kappa x {0,1}^n -> {0,1}^n with exact inverses.
# ABOUTME: Unbalanced Feistel network over numpy uint64 lanes, plus the linear maps sigma and R.
import functools
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import FEISTEL_ROUNDS
from .errors import ParameterError

logger = logging.getLogger(__name__)

MIN_WIDTH = 3
MAX_WIDTH = 24
MASK64 = (1 << 64) - 1

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_KEY_MIX = np.uint64(0x9E3779B97F4A7C15)
_HALF_MIX = np.uint64(0xC2B2AE3D27D4EB4F)
_ROUND_STEP = 0xD1B54A32D192ED03
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)


def _mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer over uint64 arrays (wrapping multiplication)."""
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _mix64_int(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _check_width(name: str, width: int) -> None:
    if not MIN_WIDTH <= width <= MAX_WIDTH:
        raise ParameterError(f"{name}={width} outside supported range {MIN_WIDTH}..{MAX_WIDTH}")


@dataclass(frozen=True)
class CipherParams:
    kappa: int
    n: int
    cipher_id: int

    def __post_init__(self) -> None:
        _check_width("kappa", self.kappa)
        _check_width("n", self.n)
        if not 0 <= self.cipher_id <= MASK64:
            raise ParameterError(f"cipher_id {self.cipher_id:#x} is not a 64-bit value")


@dataclass(frozen=True)
class Block:
    value: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 1 or not 0 <= self.value < (1 << self.width):
            raise ParameterError(f"block value {self.value:#x} does not fit {self.width} bits")


@dataclass(frozen=True)
class Key:
    value: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 1 or not 0 <= self.value < (1 << self.width):
            raise ParameterError(f"key value {self.value:#x} does not fit {self.width} bits")


class ToyCipher:
    """Keyed permutation family over n-bit blocks.

    The left half holds ceil(n/2) bits and the right half floor(n/2) bits, so
    odd block widths are supported. Even rounds update the left half from the
    right, odd rounds the right from the left; decryption replays the rounds
    backwards. ``enc``/``dec`` broadcast keys against blocks, so a column of
    keys against a row of blocks yields a (keys, blocks) matrix.
    """

    def __init__(self, params: CipherParams, rounds: int = FEISTEL_ROUNDS) -> None:
        if rounds < 8:
            raise ParameterError(f"Feistel needs at least 8 rounds, got {rounds}")
        self.params = params
        self.rounds = rounds
        self._right_bits = params.n // 2
        self._left_bits = params.n - self._right_bits
        self._right_shift = np.uint64(self._right_bits)
        self._right_mask = np.uint64((1 << self._right_bits) - 1)
        self._round_terms = [
            np.uint64(_mix64_int(params.cipher_id ^ (((r + 1) * _ROUND_STEP) & MASK64)))
            for r in range(rounds)
        ]

    @property
    def kappa(self) -> int:
        return self.params.kappa

    @property
    def n(self) -> int:
        return self.params.n

    def _round_keys(self, key: np.ndarray) -> list[np.ndarray]:
        spread = key * _KEY_MIX
        return [_mix64(spread ^ term) for term in self._round_terms]

    @staticmethod
    def _f(round_key: np.ndarray, half: np.ndarray, out_bits: int) -> np.ndarray:
        return _mix64(round_key ^ (half * _HALF_MIX)) >> np.uint64(64 - out_bits)

    def enc(self, key, block):
        """E_key(block); returns an int when both arguments are scalars."""
        scalar = np.isscalar(key) and np.isscalar(block)
        k = np.atleast_1d(np.asarray(key, dtype=np.uint64))
        x = np.atleast_1d(np.asarray(block, dtype=np.uint64))
        left = x >> self._right_shift
        right = x & self._right_mask
        for r, rk in enumerate(self._round_keys(k)):
            if r % 2 == 0:
                left = left ^ self._f(rk, right, self._left_bits)
            else:
                right = right ^ self._f(rk, left, self._right_bits)
        out = (left << self._right_shift) | right
        return int(out.flat[0]) if scalar else out

    def dec(self, key, block):
        """D_key(block), the exact inverse of ``enc`` for the same key."""
        scalar = np.isscalar(key) and np.isscalar(block)
        k = np.atleast_1d(np.asarray(key, dtype=np.uint64))
        x = np.atleast_1d(np.asarray(block, dtype=np.uint64))
        left = x >> self._right_shift
        right = x & self._right_mask
        round_keys = self._round_keys(k)
        for r in range(self.rounds - 1, -1, -1):
            if r % 2 == 0:
                left = left ^ self._f(round_keys[r], right, self._left_bits)
            else:
                right = right ^ self._f(round_keys[r], left, self._right_bits)
        out = (left << self._right_shift) | right
        return int(out.flat[0]) if scalar else out


@functools.lru_cache(maxsize=256)
def toy_cipher(params: CipherParams) -> ToyCipher:
    return ToyCipher(params)


def _check_operands(params: CipherParams, key: Key, block: Block) -> None:
    if key.width != params.kappa:
        raise ParameterError(f"key width {key.width} != kappa {params.kappa}")
    if block.width != params.n:
        raise ParameterError(f"block width {block.width} != n {params.n}")


def encrypt(params: CipherParams, key: Key, block: Block) -> Block:
    _check_operands(params, key, block)
    return Block(toy_cipher(params).enc(key.value, block.value), params.n)


def decrypt(params: CipherParams, key: Key, block: Block) -> Block:
    _check_operands(params, key, block)
    return Block(toy_cipher(params).dec(key.value, block.value), params.n)


def _operand(x):
    if np.isscalar(x):
        return int(x)
    return np.asarray(x, dtype=np.uint64)


@dataclass(frozen=True)
class LinearOps:
    """sigma = rotate-left-by-1, reflect = bit reversal, both on n-bit words."""

    n: int

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    def sigma(self, x):
        x = _operand(x)
        return ((x << 1) | (x >> (self.n - 1))) & self.mask

    def sigma_inv(self, x):
        x = _operand(x)
        return ((x >> 1) | (x << (self.n - 1))) & self.mask

    def reflect(self, x):
        x = _operand(x)
        out = x & 0
        for i in range(self.n):
            out = out | (((x >> i) & 1) << (self.n - 1 - i))
        return out

    def involution_check(self, f: Callable) -> bool:
        """f(f(x)) == x, exhaustively for n <= 16 and on 2^16 seeded samples above."""
        if self.n <= 16:
            xs = np.arange(1 << self.n, dtype=np.uint64)
        else:
            xs = np.random.default_rng(0).integers(0, 1 << self.n, size=1 << 16, dtype=np.uint64)
        return bool(np.array_equal(np.asarray(f(f(xs)), dtype=np.uint64), xs))


def linear_ops(n: int) -> LinearOps:
    if n < 2:
        raise ParameterError(f"linear ops need n >= 2, got {n}")
    return LinearOps(n)
