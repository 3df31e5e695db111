"""
Monte-Carlo BER, complexity and antenna-scaling sweeps.

Trial t of sweep point i draws its scene from stream (seed, i << 32 | t) and runs every
configured algorithm on that same scene. Trials are processed in fixed blocks split
across a process pool; results are reassembled in trial order, so reports depend only on
(config, seed).
"""

from multiprocessing import Pool
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from src.core_linalg import trial_stream
from src.errors import MissingModel
from src.lattice_model import sample_scene
from src.logging_system import get_run_logger

from .config import ScalingConfig, SweepConfig, worker_count
from .report import BER_COLUMNS, COMPLEXITY_COLUMNS, SCALING_COLUMNS, SweepReport, aggregate, write_csv
from .trials import TrialParams, TrialRecord, cached_model, run_trial

run_logger = get_run_logger(__name__)

ChunkTask = Tuple[str, int, float, int, int]


def trial_params(cfg: SweepConfig) -> TrialParams:
    model = None
    if cfg.needs_model:
        if cfg.model_path is None:
            raise MissingModel("algorithm 'hats' needs a trained model (--model)", num_antennas=cfg.num_tx)
        model = cached_model(cfg.model_path, cfg.final_relu, cfg.m)
    return TrialParams(memory=cfg.memory, order=cfg.order, model=model)


def run_trials(cfg: SweepConfig, point_index: int, snr_db: float, start: int, stop: int) -> List[List[TrialRecord]]:
    """Records for trials [start, stop) of one point, one list per trial in algorithm order."""
    params = trial_params(cfg)
    out = []
    for trial in range(start, stop):
        scene, _ = sample_scene(cfg.num_tx, cfg.num_rx, snr_db, trial_stream(cfg.seed, point_index, trial))
        out.append([run_trial(scene, algorithm, params, snr_db) for algorithm in cfg.algorithms])
    return out


def _run_chunk(task: ChunkTask) -> List[List[TrialRecord]]:
    cfg_json, point_index, snr_db, start, stop = task
    return run_trials(SweepConfig.model_validate_json(cfg_json), point_index, snr_db, start, stop)


def _split(start: int, stop: int, parts: int) -> List[Tuple[int, int]]:
    size, extra = divmod(stop - start, parts)
    bounds, lo = [], start
    for i in range(parts):
        hi = lo + size + (1 if i < extra else 0)
        if hi > lo:
            bounds.append((lo, hi))
        lo = hi
    return bounds


def _should_stop(cfg: SweepConfig, records: Dict[str, List[TrialRecord]]) -> bool:
    if cfg.target_errors is not None:
        if all(sum(r.bit_errors for r in recs) >= cfg.target_errors for recs in records.values()):
            return True
    if cfg.max_bits is not None:
        if all(sum(r.bits for r in recs) >= cfg.max_bits for recs in records.values()):
            return True
    return False


def run_point(cfg: SweepConfig, point_index: int, snr_db: float, pool=None, workers: int = 1) -> Dict[str, List[TrialRecord]]:
    """
    Run all trials of one SNR point in blocks of cfg.block_trials.

    Args:
        cfg: Sweep configuration
        point_index: Position of the point in the sweep, part of every trial's stream id
        snr_db: SNR of the point
        pool: Process pool used to split each block, or None to run inline
        workers: Number of chunks a block is split into when a pool is given

    Returns:
        Records per algorithm name, in trial order
    """
    records: Dict[str, List[TrialRecord]] = {a: [] for a in cfg.algorithms}
    cfg_json = cfg.model_dump_json()
    done = 0
    while done < cfg.trials:
        block_end = min(cfg.trials, done + cfg.block_trials)
        if pool is None:
            chunks = [run_trials(cfg, point_index, snr_db, done, block_end)]
        else:
            tasks = [(cfg_json, point_index, snr_db, lo, hi) for lo, hi in _split(done, block_end, workers)]
            chunks = pool.map(_run_chunk, tasks)
        for chunk in chunks:
            for trial_records in chunk:
                for record in trial_records:
                    records[record.algorithm].append(record)
        done = block_end
        run_logger.run_progress(f"snr {snr_db}", done, cfg.trials)
        if _should_stop(cfg, records):
            run_logger.run_debug(f"snr {snr_db} stopped early after {done} trials")
            break
    return records


def _log_row(row) -> None:
    run_logger.run_metrics(
        f"snr={row.snr_db} {row.algorithm}", trials=row.trials, ber=row.ber, mean_visited=row.mean_visited,
        p95_visited=row.p95_visited, peak_active=row.peak_active, peak_resident=row.peak_resident,
        mean_flops=row.mean_flops, failures=row.failures)


class _PoolScope:
    """A process pool when more than one worker is requested, otherwise inline execution."""

    def __init__(self, workers: int):
        self.workers = workers
        self.pool = None

    def __enter__(self):
        if self.workers > 1:
            self.pool = Pool(self.workers)
        return self.pool

    def __exit__(self, exc_type, exc, tb):
        if self.pool is not None:
            if exc_type is None:
                self.pool.close()
            else:
                self.pool.terminate()
            self.pool.join()
        return False


def _flush(report: SweepReport, out: Optional[str], columns: Sequence[str]) -> None:
    if out is not None:
        path = write_csv(report, out, columns)
        run_logger.run_info(f"wrote {len(report.rows)} rows to {path}")


def run_sweep(cfg: SweepConfig, columns: Sequence[str], workers: Optional[int] = None) -> SweepReport:
    """
    Run every SNR point of a sweep and aggregate one row per (point, algorithm).

    Args:
        cfg: Sweep configuration; cfg.out, when set, receives the CSV
        columns: CSV columns to write
        workers: Worker processes, default from worker_count()

    Returns:
        SweepReport; on KeyboardInterrupt the completed rows are flushed first
    """
    workers = worker_count() if workers is None else workers
    if cfg.needs_model:
        trial_params(cfg)
    report = SweepReport(header=cfg.header())
    run_logger.run_start("sweep", nt=cfg.num_tx, nr=cfg.num_rx, snr=list(cfg.snr_list), trials=cfg.trials,
                         algos=list(cfg.algorithms), memory=cfg.memory, seed=cfg.seed, workers=workers)
    try:
        with _PoolScope(workers) as pool:
            for point_index, snr_db in enumerate(cfg.snr_list):
                records = run_point(cfg, point_index, snr_db, pool, workers)
                for algorithm in cfg.algorithms:
                    row = aggregate(records[algorithm])
                    report.add(row)
                    _log_row(row)
    except KeyboardInterrupt:
        report.interrupted = True
        run_logger.run_warning(f"interrupted, flushing {len(report.rows)} completed rows")
        _flush(report, cfg.out, columns)
        raise
    _flush(report, cfg.out, columns)
    run_logger.run_success(f"sweep finished with {len(report.rows)} rows", "sweep")
    return report


def sweep_ber(cfg: SweepConfig, workers: Optional[int] = None) -> SweepReport:
    return run_sweep(cfg, BER_COLUMNS, workers)


def sweep_complexity(cfg: SweepConfig, workers: Optional[int] = None) -> SweepReport:
    return run_sweep(cfg, COMPLEXITY_COLUMNS, workers)


def sweep_scaling(cfg: ScalingConfig, workers: Optional[int] = None) -> SweepReport:
    """
    Mean visited nodes per antenna count at a fixed SNR.

    Args:
        cfg: Sizes, SNR and algorithms; learned algorithms load
            model_dir/hats_NxN.bin for every size N
        workers: Worker processes, default from worker_count()

    Returns:
        SweepReport with one row per (size, algorithm)

    Raises:
        MissingModel: a learned algorithm has no model for some size
    """
    workers = worker_count() if workers is None else workers
    for n in cfg.sizes:
        point_cfg = cfg.point(n)
        if point_cfg.needs_model and not Path(point_cfg.model_path).is_file():
            raise MissingModel(f"no trained model for {n}x{n} at {point_cfg.model_path}", num_antennas=n)

    report = SweepReport(header=cfg.header())
    run_logger.run_start("sweep_scaling", sizes=list(cfg.sizes), snr=cfg.snr_db, trials=cfg.trials,
                         algos=list(cfg.algorithms), seed=cfg.seed, workers=workers)
    try:
        with _PoolScope(workers) as pool:
            for point_index, n in enumerate(cfg.sizes):
                point_cfg = cfg.point(n)
                records = run_point(point_cfg, point_index, cfg.snr_db, pool, workers)
                for algorithm in cfg.algorithms:
                    row = aggregate(records[algorithm], num_antennas=n)
                    report.add(row)
                    _log_row(row)
    except KeyboardInterrupt:
        report.interrupted = True
        run_logger.run_warning(f"interrupted, flushing {len(report.rows)} completed rows")
        _flush(report, cfg.out, SCALING_COLUMNS)
        raise
    _flush(report, cfg.out, SCALING_COLUMNS)
    run_logger.run_success(f"scaling sweep finished with {len(report.rows)} rows", "sweep_scaling")
    return report
