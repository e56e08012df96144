# ABOUTME: Runs seeded attacks into reports and sweeps trials concurrently into deterministic CSV tables.
# ABOUTME: Trials run in worker threads behind a semaphore; results are kept in trial order.
import asyncio
import csv
import logging
import time
from pathlib import Path
from statistics import fmean
from typing import Any

import numpy as np

from .attacks import AttackContext, get_attack
from .attacks.sitm import distinguisher_kind
from .config import THREADS
from .constructions import ConstructionInstance, OracleHandle, build_instance
from .engine.ledger import CostLedger
from .errors import WorkbenchError
from .models import AttackReport, ExperimentConfig, PredictedExponents

logger = logging.getLogger(__name__)


def _hex_keys(instance: ConstructionInstance, keys: tuple[int, ...]) -> dict[str, str]:
    return {
        slot.name: f"0x{value:0{(slot.width + 3) // 4}x}"
        for slot, value in zip(instance.spec.key_slots, keys)
    }


def _confirm(instance: ConstructionInstance, keys: tuple[int, ...], seed: int) -> bool:
    """Re-encrypt two fresh plaintexts under the recovered keys against the keyed instance."""
    rng = np.random.default_rng([seed, 2])
    plaintexts = rng.choice(1 << instance.spec.n, size=2, replace=False).astype(np.uint64)
    expected = np.asarray(instance.encrypt(plaintexts), dtype=np.uint64)
    got = np.asarray(instance.spec.encrypt(keys, plaintexts), dtype=np.uint64)
    return bool(np.array_equal(expected, got))


def run_attack(
    config: ExperimentConfig,
    seed: int | None = None,
    *,
    injected_claws: tuple[tuple[int, int], ...] = (),
    key_space: np.ndarray | None = None,
) -> AttackReport:
    """Build the seeded instance, run the configured attack and return its report."""
    seed = config.seed if seed is None else seed
    attack = get_attack(config.attack)
    instance = build_instance(
        config.resolved_scheme,
        config.kappa,
        config.n,
        seed,
        middle_kind=config.resolved_middle if attack.middle_kinds else None,
        share_ciphers=config.share_ciphers,
        outer=config.outer,
    )
    ledger = CostLedger()
    handle = OracleHandle(instance, config.resolved_model, ledger)
    ctx = AttackContext(
        handle=handle,
        ledger=ledger,
        rng=np.random.default_rng([seed, 1]),
        backend=config.backend,
        r=config.r,
        t=config.t,
        distinguisher=config.distinguisher,
        key_space=key_space,
        injected_claws=injected_claws,
    )
    logger.info(
        "Running %s on %s (kappa=%d, n=%d, seed=%d)",
        config.attack, instance.spec.label, config.kappa, config.n, seed,
    )
    started = time.perf_counter()
    outcome = attack.run(ctx)
    elapsed = time.perf_counter() - started

    success = outcome.success
    failure_reason = outcome.failure_reason
    if success and not _confirm(instance, outcome.keys, seed):
        logger.error("Recovered keys for %s (seed=%d) failed the independent check", config.attack, seed)
        success, failure_reason = False, "recovered keys failed independent re-encryption"
    logger.info("Finished %s (seed=%d): success=%s", config.attack, seed, success)

    return AttackReport(
        attack_id=config.attack,
        scheme=instance.spec.scheme.value,
        middle=instance.spec.middle.kind.value if instance.spec.middle is not None else None,
        distinguisher=distinguisher_kind(instance.spec, config.distinguisher).value if attack.sieve else None,
        kappa=config.kappa,
        n=config.n,
        t=outcome.t,
        r=outcome.r,
        model=handle.model.value,
        backend=config.backend.value,
        seed=seed,
        success=success,
        recovered_keys=_hex_keys(instance, outcome.keys) if outcome.keys is not None else None,
        ledger=ledger.snapshot(),
        predicted=PredictedExponents.from_prediction(outcome.prediction),
        failure_reason=failure_reason,
        wall_clock_seconds=round(elapsed, 6) if config.timings else None,
    )


class SweepProgress:
    """Async-safe trial counters for a running sweep."""

    def __init__(self) -> None:
        self._state = {"total": 0, "processed": 0, "successful": 0, "failed": 0}
        self._lock = asyncio.Lock()

    async def init(self, total: int) -> None:
        async with self._lock:
            self._state = {"total": total, "processed": 0, "successful": 0, "failed": 0}

    async def increment(self, **kwargs: int) -> None:
        async with self._lock:
            for key, delta in kwargs.items():
                if key in self._state:
                    self._state[key] += delta
            state = dict(self._state)
        logger.info("Sweep progress: %d/%d trials (%d failed)", state["processed"], state["total"], state["failed"])

    async def get(self) -> dict:
        async with self._lock:
            return dict(self._state)


async def run_sweep(
    config: ExperimentConfig,
    *,
    threads: int = THREADS,
    progress: SweepProgress | None = None,
) -> list[tuple[ExperimentConfig, list[AttackReport]]]:
    """Every grid point times ``trials`` seeds (seed = base ^ trial), grouped per grid point."""
    groups = config.grid()
    progress = progress or SweepProgress()
    await progress.init(sum(g.trials for g in groups))
    semaphore = asyncio.Semaphore(max(1, threads))

    async def one(group: ExperimentConfig, trial: int) -> AttackReport:
        async with semaphore:
            report = await asyncio.to_thread(run_attack, group, group.seed ^ trial)
        await progress.increment(processed=1, successful=int(report.success), failed=int(not report.success))
        return report

    tasks = [one(group, trial) for group in groups for trial in range(group.trials)]
    results = await asyncio.gather(*tasks, return_exceptions=True)
    for result in results:
        if isinstance(result, BaseException):
            logger.error("Sweep trial crashed: %s", result)
            raise result

    out = []
    position = 0
    for group in groups:
        out.append((group, list(results[position:position + group.trials])))
        position += group.trials
    return out


def flatten_report(report: AttackReport) -> dict[str, Any]:
    """Dotted-path columns (ledger.grover_iterations); recovered keys collapse to one cell."""
    data = report.model_dump(mode="json")
    keys = data.pop("recovered_keys")
    row: dict[str, Any] = {"row_type": "trial"}

    def walk(prefix: str, value: Any) -> None:
        if isinstance(value, dict):
            for key, inner in value.items():
                walk(f"{prefix}.{key}" if prefix else key, inner)
        else:
            row[prefix] = value

    walk("", data)
    row["recovered_keys"] = ";".join(f"{k}={v}" for k, v in keys.items()) if keys else ""
    return row


def _summary_row(group_index: int, rows: list[dict[str, Any]], columns: list[str]) -> dict[str, Any]:
    first = rows[0]
    summary: dict[str, Any] = dict.fromkeys(columns, "")
    summary.update(
        row_type="summary",
        group=group_index,
        attack_id=first["attack_id"],
        scheme=first["scheme"],
        kappa=first["kappa"],
        n=first["n"],
        r=first["r"],
        success=f"{fmean(float(row['success']) for row in rows):.4f}",
    )
    for column in columns:
        if not column.startswith("ledger."):
            continue
        values = [row[column] for row in rows]
        if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            summary[column] = f"{fmean(values):.4f}"
    return summary


def write_sweep_csv(groups: list[tuple[ExperimentConfig, list[AttackReport]]], path: Path | str) -> None:
    """One row per trial in trial order, then one summary row per grid point."""
    rows: list[dict[str, Any]] = []
    summaries: list[dict[str, Any]] = []
    columns: list[str] = []
    for index, (_, reports) in enumerate(groups):
        group_rows = []
        for report in reports:
            row = flatten_report(report)
            row["group"] = index
            group_rows.append(row)
        if not columns and group_rows:
            columns = ["row_type", "group"] + [c for c in group_rows[0] if c not in ("row_type", "group")]
        rows.extend(group_rows)
        if group_rows:
            summaries.append(_summary_row(index, group_rows, columns))
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            writer.writerows(summaries)
    except OSError as exc:
        raise WorkbenchError(f"cannot write sweep table to {path}: {exc}") from exc
    logger.info("Wrote %d trial rows and %d summary rows to %s", len(rows), len(summaries), path)
