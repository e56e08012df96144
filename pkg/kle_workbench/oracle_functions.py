# ABOUTME: Meet-in-the-middle function pairs (f, g), sorted membership tables and search predicates.
# ABOUTME: f queries the construction through an oracle handle; g and the tables are offline.
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .config import MAX_FG_BITS, MAX_TABLE_ENTRIES, SCAN_CHUNK
from .constructions import (
    TWO_KEY_SCHEMES,
    ConstructionSpec,
    OracleHandle,
    Scheme,
    rewrite_3xce_as_g2kte,
)
from .engine.ledger import CostLedger, PredicateCost
from .errors import ParameterError, ResourceError

logger = logging.getLogger(__name__)

TABLE_MAGIC = b"KLEQTBL1"
_HEADER_DTYPE = np.dtype("<u4")
_HEADER_FIELDS = 5
TABLE_HEADER_BYTES = len(TABLE_MAGIC) + _HEADER_FIELDS * _HEADER_DTYPE.itemsize


def encode_blocks(blocks: np.ndarray, n: int) -> np.ndarray:
    """Concatenate t n-bit blocks per row into fixed-width big-endian byte strings.

    Byte strings compare lexicographically, so sorting and binary search work
    for any t*n, including widths beyond one machine word.
    """
    vals = np.asarray(blocks, dtype=np.uint64)
    if vals.ndim == 1:
        vals = vals[:, None]
    nbytes = (n + 7) // 8
    columns = [
        ((vals >> np.uint64(8 * (nbytes - 1 - j))) & np.uint64(0xFF)).astype(np.uint8)
        for j in range(nbytes)
    ]
    flat = np.ascontiguousarray(np.stack(columns, axis=-1).reshape(len(vals), -1))
    return flat.view(f"S{flat.shape[1]}").ravel()


def plaintext_constants(t: int, n: int, offset: int = 0) -> np.ndarray:
    """The n-bit encodings of offset+1 .. offset+t (mod 2^n)."""
    if t >= (1 << n):
        raise ParameterError(f"t={t} constants do not fit {n}-bit blocks")
    return (np.arange(1, t + 1, dtype=np.uint64) + np.uint64(offset)) & np.uint64((1 << n) - 1)


def default_t_2kte(kappa: int, n: int) -> int:
    return math.ceil(2 * kappa / n) + 1


def default_t_3xce(kappa: int, n: int) -> int:
    return math.ceil((kappa + 2 * n) / n) + 1


@dataclass(frozen=True)
class MitmFunctionPair:
    """f over the f-side key space, g over the g-side key space, both (t*n)-bit valued."""

    t: int
    n: int
    kappa: int
    f_bits: int
    g_bits: int
    f_blocks: Callable[[np.ndarray], np.ndarray]
    g_blocks: Callable[[np.ndarray], np.ndarray]
    f_cost: PredicateCost
    g_cost: PredicateCost

    @property
    def width_bits(self) -> int:
        return self.t * self.n

    def f(self, xs) -> np.ndarray:
        return encode_blocks(self.f_blocks(np.atleast_1d(np.asarray(xs, dtype=np.uint64))), self.n)

    def g(self, ys) -> np.ndarray:
        return encode_blocks(self.g_blocks(np.atleast_1d(np.asarray(ys, dtype=np.uint64))), self.n)


def _check_width(t: int, n: int) -> None:
    if t * n > MAX_FG_BITS:
        raise ParameterError(f"f/g width t*n={t * n} exceeds the configured maximum {MAX_FG_BITS}")


def build_fg_2kte(handle: OracleHandle, t: int | None = None) -> MitmFunctionPair:
    """f(x) = D3_x(Enc(D1_x(i))) and g(y) = E2_y(i) over i in 1..t (D_y(i) for the EDE shape)."""
    spec = handle.spec
    if spec.scheme not in TWO_KEY_SCHEMES:
        raise ParameterError(f"build_fg_2kte needs a two-key triple scheme, got {spec.scheme}")
    t = default_t_2kte(spec.kappa, spec.n) if t is None else t
    _check_width(t, spec.n)
    consts = plaintext_constants(t, spec.n)[None, :]
    ciphers = spec.ciphers
    if spec.scheme is Scheme.GENERALIZED_TWO_KEY_TRIPLE:
        outer_first, middle, outer_last = ciphers
    else:
        outer_first = middle = outer_last = ciphers[0]

    def f_blocks(xs: np.ndarray) -> np.ndarray:
        x = xs[:, None]
        return outer_last.dec(x, handle.encrypt(outer_first.dec(x, consts)))

    if spec.scheme is Scheme.TWO_KEY_TRIPLE_EDE:
        def g_blocks(ys: np.ndarray) -> np.ndarray:
            return middle.dec(ys[:, None], consts)
    else:
        def g_blocks(ys: np.ndarray) -> np.ndarray:
            return middle.enc(ys[:, None], consts)

    return MitmFunctionPair(
        t=t,
        n=spec.n,
        kappa=spec.kappa,
        f_bits=spec.kappa,
        g_bits=spec.kappa,
        f_blocks=f_blocks,
        g_blocks=g_blocks,
        f_cost=PredicateCost(construction_queries=t, cipher_evals=2 * t),
        g_cost=PredicateCost(cipher_evals=t),
    )


def build_fg_3xce(handle: OracleHandle, t: int | None = None) -> MitmFunctionPair:
    """3XCE through its G2kTE rewrite: f over z = (k << n) | k1, g(k2) = i xor k2."""
    spec = handle.spec
    rewrite = rewrite_3xce_as_g2kte(spec)
    t = default_t_3xce(spec.kappa, spec.n) if t is None else t
    _check_width(t, spec.n)
    consts = plaintext_constants(t, spec.n)[None, :]

    def f_blocks(zs: np.ndarray) -> np.ndarray:
        z = zs[:, None]
        return rewrite.e3.inverse(z, handle.encrypt(rewrite.e1.inverse(z, consts)))

    def g_blocks(ys: np.ndarray) -> np.ndarray:
        return rewrite.e2.forward(ys[:, None], consts)

    return MitmFunctionPair(
        t=t,
        n=spec.n,
        kappa=spec.kappa,
        f_bits=spec.kappa + spec.n,
        g_bits=spec.n,
        f_blocks=f_blocks,
        g_blocks=g_blocks,
        f_cost=PredicateCost(construction_queries=t, cipher_evals=2 * t),
        g_cost=PredicateCost(),
    )


@dataclass(frozen=True)
class TableView:
    """A contiguous slice of the sorted table: L_i and its first components L_i^1."""

    values: np.ndarray
    keys: np.ndarray

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def comparisons(self) -> int:
        """Binary-search comparisons per lookup: ceil(log2 |view|)."""
        return math.ceil(math.log2(self.size)) if self.size > 1 else 0

    def contains(self, values: np.ndarray) -> np.ndarray:
        if self.size == 0:
            return np.zeros(len(values), dtype=bool)
        pos = np.searchsorted(self.values, values, side="left")
        pos = np.minimum(pos, self.size - 1)
        return self.values[pos] == values

    def lookup(self, value) -> np.ndarray:
        """All y stored under ``value``, ascending."""
        lo = np.searchsorted(self.values, value, side="left")
        hi = np.searchsorted(self.values, value, side="right")
        return np.sort(self.keys[lo:hi])


@dataclass(frozen=True)
class MembershipTable:
    values: np.ndarray
    keys: np.ndarray
    r: int
    t: int
    n: int
    kappa: int
    key_bits: int

    def bounds(self, i: int) -> tuple[int, int]:
        total = len(self.values)
        return i * total // self.r, (i + 1) * total // self.r

    def view(self, i: int | None = None) -> TableView:
        if i is None:
            return TableView(self.values, self.keys)
        if not 0 <= i < self.r:
            raise ParameterError(f"sub-table index {i} outside 0..{self.r - 1}")
        start, stop = self.bounds(i)
        return TableView(self.values[start:stop], self.keys[start:stop])

    @property
    def max_view_size(self) -> int:
        return max(stop - start for start, stop in map(self.bounds, range(self.r)))

    def lookup(self, value, i: int | None = None) -> np.ndarray:
        return self.view(i).lookup(value)

    def contains(self, values, i: int | None = None) -> np.ndarray:
        return self.view(i).contains(values)

    def dump(self, path: str | Path) -> None:
        """Flat binary file: magic plus (kappa, g-side bits, n, t, r) as u32, then (g-value, y) records."""
        header = TABLE_MAGIC + np.array(
            [self.kappa, self.key_bits, self.n, self.t, self.r], dtype=_HEADER_DTYPE
        ).tobytes()
        records = np.empty(len(self.values), dtype=_record_dtype(self.t, self.n))
        records["g"] = self.values
        records["y"] = self.keys
        Path(path).write_bytes(header + records.tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "MembershipTable":
        raw = Path(path).read_bytes()
        if raw[:8] != TABLE_MAGIC:
            raise ParameterError(f"{path} is not a membership table file")
        if len(raw) < TABLE_HEADER_BYTES:
            raise ParameterError(f"{path} is truncated")
        kappa, key_bits, n, t, r = (
            int(v) for v in np.frombuffer(raw[len(TABLE_MAGIC):TABLE_HEADER_BYTES], dtype=_HEADER_DTYPE)
        )
        records = np.frombuffer(raw[TABLE_HEADER_BYTES:], dtype=_record_dtype(t, n))
        return cls(
            values=records["g"].copy(),
            keys=records["y"].astype(np.uint64),
            r=r,
            t=t,
            n=n,
            kappa=kappa,
            key_bits=key_bits,
        )


def _record_dtype(t: int, n: int) -> np.dtype:
    return np.dtype([("g", f"S{t * ((n + 7) // 8)}"), ("y", "<u4")])


def build_membership_table(
    pair: MitmFunctionPair,
    r: int = 1,
    *,
    ledger: CostLedger | None = None,
    chunk: int = SCAN_CHUNK,
) -> MembershipTable:
    """Tabulate (g(y), y) for every y, sort by g(y) and partition into r sub-tables."""
    entries = 1 << pair.g_bits
    if not 1 <= r <= entries:
        raise ParameterError(f"partition arity r={r} outside 1..{entries}")
    if entries > MAX_TABLE_ENTRIES:
        raise ResourceError("membership table exceeds the memory budget", required=entries)
    ys = np.arange(entries, dtype=np.uint64)
    values = np.concatenate([pair.g(ys[s:s + chunk]) for s in range(0, entries, chunk)])
    order = np.argsort(values, kind="stable")
    if ledger is not None:
        ledger.charge_preprocessing(
            cipher_evals=pair.g_cost.cipher_evals * entries,
            comparisons=entries * pair.g_bits,
            classical_memory_entries=entries,
        )
    logger.info("Built membership table: %d entries, r=%d, t=%d", entries, r, pair.t)
    return MembershipTable(
        values=values[order],
        keys=ys[order],
        r=r,
        t=pair.t,
        n=pair.n,
        kappa=pair.kappa,
        key_bits=pair.g_bits,
    )


class TablePredicate:
    """F(x) = 1 iff f(x) lies in the given table view."""

    def __init__(self, pair: MitmFunctionPair, view: TableView, ledger: CostLedger | None = None) -> None:
        self.pair = pair
        self.view = view
        self.ledger = ledger

    @property
    def cost(self) -> PredicateCost:
        return PredicateCost(
            construction_queries=self.pair.f_cost.construction_queries,
            cipher_evals=self.pair.f_cost.cipher_evals,
            comparisons=self.view.comparisons,
        )

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        return self.view.contains(self.pair.f(xs))

    def __call__(self, x: int) -> bool:
        if self.ledger is not None:
            self.cost.charge(self.ledger, 1)
        return bool(self.evaluate(np.array([x], dtype=np.uint64))[0])


def predicate_F_table(
    pair: MitmFunctionPair, view: TableView, ledger: CostLedger | None = None
) -> TablePredicate:
    return TablePredicate(pair, view, ledger)


class DeltaPredicate:
    """F(x, y) = 1 iff delta_i = E1_x(m_i ^ y) ^ D2_x(c_i ^ y) agrees for every data pair.

    Keys are packed as z = (x << n) | y. Only the toy ciphers are evaluated, so
    the predicate is legal under classical-query access.
    """

    def __init__(self, spec: ConstructionSpec, plaintexts, ciphertexts, ledger: CostLedger | None = None) -> None:
        rewrite = rewrite_3xce_as_g2kte(spec)
        self.spec = spec
        self._e1 = rewrite.e1
        self._e3 = rewrite.e3
        self.plaintexts = np.asarray(plaintexts, dtype=np.uint64)
        self.ciphertexts = np.asarray(ciphertexts, dtype=np.uint64)
        self.ledger = ledger

    @property
    def t(self) -> int:
        return len(self.plaintexts)

    @property
    def cost(self) -> PredicateCost:
        return PredicateCost(cipher_evals=2 * self.t)

    def deltas(self, zs) -> np.ndarray:
        z = np.atleast_1d(np.asarray(zs, dtype=np.uint64))[:, None]
        return self._e1.forward(z, self.plaintexts[None, :]) ^ self._e3.inverse(z, self.ciphertexts[None, :])

    def evaluate(self, zs: np.ndarray) -> np.ndarray:
        d = self.deltas(zs)
        return np.all(d == d[:, :1], axis=1)

    def __call__(self, z: int) -> bool:
        if self.ledger is not None:
            self.cost.charge(self.ledger, 1)
        return bool(self.evaluate(np.array([z], dtype=np.uint64))[0])


def predicate_F_delta(
    spec: ConstructionSpec, plaintexts, ciphertexts, ledger: CostLedger | None = None
) -> DeltaPredicate:
    if len(plaintexts) < 2 or len(plaintexts) != len(ciphertexts):
        raise ParameterError("the delta predicate needs at least 2 plaintext-ciphertext pairs")
    return DeltaPredicate(spec, plaintexts, ciphertexts, ledger)
