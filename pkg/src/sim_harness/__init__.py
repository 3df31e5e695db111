"""
Monte-Carlo harness: scenes, trials, BER/complexity/scaling sweeps, CSV reports,
oracle invariant suites and the command line.
"""

from src.lattice_model import ComplexScene, sample_scene, snr_to_rho

from .cli import build_parser, main
from .config import (
    ALGORITHMS,
    OracleCheckConfig,
    ScalingConfig,
    SweepConfig,
    config_header,
    parse_memory,
    parse_snr_range,
    split_algorithm,
    worker_count,
)
from .oracle_check import OracleCheckReport, SuiteResult, run_oracle_check
from .report import BER_COLUMNS, COMPLEXITY_COLUMNS, SCALING_COLUMNS, ReportRow, SweepReport, aggregate, write_csv
from .sweeps import run_point, run_sweep, sweep_ber, sweep_complexity, sweep_scaling
from .trials import DETECTORS, TrialParams, TrialRecord, detect, run_trial

__all__ = [
    'ComplexScene',
    'sample_scene',
    'snr_to_rho',
    'ALGORITHMS',
    'DETECTORS',
    'SweepConfig',
    'ScalingConfig',
    'OracleCheckConfig',
    'TrialParams',
    'TrialRecord',
    'ReportRow',
    'SweepReport',
    'OracleCheckReport',
    'SuiteResult',
    'BER_COLUMNS',
    'COMPLEXITY_COLUMNS',
    'SCALING_COLUMNS',
    'config_header',
    'parse_snr_range',
    'parse_memory',
    'split_algorithm',
    'worker_count',
    'detect',
    'run_trial',
    'run_point',
    'run_sweep',
    'sweep_ber',
    'sweep_complexity',
    'sweep_scaling',
    'aggregate',
    'write_csv',
    'run_oracle_check',
    'build_parser',
    'main',
]
