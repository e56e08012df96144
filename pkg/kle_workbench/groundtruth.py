# ABOUTME: Exhaustive ground-truth oracles: brute-force key search, claw enumeration, mirror slid pairs.
# ABOUTME: Independent of the attack and engine code paths so it can check both.
import logging
from dataclasses import dataclass

import numpy as np

from .config import BRUTE_FORCE_MAX_BITS, SCAN_CHUNK
from .constructions import ConstructionInstance, ConstructionSpec, Scheme
from .errors import ParameterError, ResourceError
from .oracle_functions import MitmFunctionPair

logger = logging.getLogger(__name__)


def brute_force_keys(spec: ConstructionSpec, plaintexts, ciphertexts) -> list[tuple[int, ...]]:
    """Every key tuple consistent with all (m, c) pairs, in flat-index order."""
    ms = [int(v) for v in np.atleast_1d(np.asarray(plaintexts, dtype=np.uint64))]
    cs = [int(v) for v in np.atleast_1d(np.asarray(ciphertexts, dtype=np.uint64))]
    if len(ms) != len(cs):
        raise ParameterError("plaintext and ciphertext counts differ")
    bits = spec.key_bits
    if bits > BRUTE_FORCE_MAX_BITS:
        raise ResourceError(f"brute force over {bits} key bits exceeds the budget", required=1 << bits)
    found: list[np.ndarray] = []
    total = 1 << bits
    for start in range(0, total, SCAN_CHUNK):
        idx = np.arange(start, min(start + SCAN_CHUNK, total), dtype=np.uint64)
        for m, c in zip(ms, cs):
            if not len(idx):
                break
            got = np.asarray(spec.encrypt(spec.split_key_index(idx), m), dtype=np.uint64)
            idx = idx[got == np.uint64(c)]
        found.append(idx)
    survivors = np.concatenate(found) if found else np.empty(0, dtype=np.uint64)
    logger.debug("Brute force kept %d of %d key tuples", len(survivors), total)
    return [tuple(int(k) for k in spec.split_key_index(int(i))) for i in survivors]


def enumerate_claws(pair: MitmFunctionPair) -> list[tuple[int, int]]:
    """All (x, y) with f(x) == g(y), by intersecting the two full value sets."""
    for side, bits in (("f", pair.f_bits), ("g", pair.g_bits)):
        if bits > BRUTE_FORCE_MAX_BITS:
            raise ResourceError(f"{side}-side domain of {bits} bits exceeds the budget", required=1 << bits)
    f_values = pair.f(np.arange(1 << pair.f_bits, dtype=np.uint64))
    g_values = pair.g(np.arange(1 << pair.g_bits, dtype=np.uint64))
    claws = []
    for value in np.intersect1d(f_values, g_values):
        xs = np.flatnonzero(f_values == value)
        ys = np.flatnonzero(g_values == value)
        claws.extend((int(x), int(y)) for x in xs for y in ys)
    return sorted(claws)


@dataclass(frozen=True)
class MirrorScan:
    pairs: list[tuple[int, int]]
    violations: int


def enumerate_mirror_pairs(instance: ConstructionInstance, plaintexts) -> MirrorScan:
    """Ordered index pairs (i, j), i != j, whose inner states are slid onto each other.

    With u = E1_k(m ^ k1) and v = D2_k(c ^ k1), the pair condition is
    u_i == P(v_j) (P the identity for involutive middle layers), and it must
    imply v_i == u_j; each pair where it does not is counted as a violation.
    """
    spec = instance.spec
    if spec.scheme not in (Scheme.THREE_XOR_CASCADE, Scheme.TILDE_THREE_XOR_CASCADE):
        raise ParameterError(f"mirror slid pairs need a 3XCE-shaped scheme, got {spec.scheme}")
    ms = np.atleast_1d(np.asarray(plaintexts, dtype=np.uint64))
    if len(ms) > 1 << 12:
        raise ResourceError("mirror pair enumeration is limited to 2^12 plaintexts", required=len(ms))
    if len(ms) == 0:
        return MirrorScan([], 0)
    k, k1, _ = instance.secret_keys
    e1, e2 = spec.ciphers
    cs = np.asarray(instance.encrypt(ms), dtype=np.uint64)
    u = np.asarray(e1.enc(k, ms ^ np.uint64(k1)), dtype=np.uint64)
    v = np.asarray(e2.dec(k, cs ^ np.uint64(k1)), dtype=np.uint64)
    p = spec.middle.public_p
    pv = v if p is None else p[v.astype(np.intp)].astype(np.uint64)
    pairs: list[tuple[int, int]] = []
    violations = 0
    for i, j in zip(*np.nonzero(u[:, None] == pv[None, :])):
        if i == j:
            continue
        pairs.append((int(i), int(j)))
        if v[i] != u[j]:
            violations += 1
    return MirrorScan(pairs, violations)
