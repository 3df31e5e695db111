"""
Aggregated sweep rows and CSV emission.
"""

import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .trials import TrialRecord

BER_COLUMNS = ('snr_db', 'algorithm', 'trials', 'bits', 'bit_errors', 'ber')
COMPLEXITY_COLUMNS = ('snr_db', 'algorithm', 'trials', 'mean_visited', 'p95_visited', 'mean_expanded', 'peak_active')
SCALING_COLUMNS = ('num_antennas', 'snr_db', 'algorithm', 'mean_visited')


@dataclass
class ReportRow:
    snr_db: float
    algorithm: str
    trials: int
    bits: int
    bit_errors: int
    ber: float
    mean_visited: float
    p95_visited: float
    mean_expanded: float
    peak_active: int
    mean_flops: float
    peak_resident: int
    failures: int = 0
    num_antennas: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)


def aggregate(records: Sequence[TrialRecord], num_antennas: Optional[int] = None) -> ReportRow:
    """Sum counts and summarize visited-node statistics; records must share (snr, algorithm)."""
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    first = records[0]
    bits = sum(r.bits for r in records)
    errors = sum(r.bit_errors for r in records)
    visited = np.array([r.visited for r in records], dtype=np.float64)
    return ReportRow(
        snr_db=first.snr_db,
        algorithm=first.algorithm,
        trials=len(records),
        bits=bits,
        bit_errors=errors,
        ber=errors / bits if bits else 0.0,
        mean_visited=float(visited.mean()),
        p95_visited=float(np.percentile(visited, 95)),
        mean_expanded=float(np.mean([r.expanded for r in records])),
        peak_active=max(r.peak_active for r in records),
        mean_flops=float(np.mean([r.flop_estimate for r in records])),
        peak_resident=max(r.peak_resident for r in records),
        failures=sum(1 for r in records if not r.success),
        num_antennas=num_antennas,
    )


@dataclass
class SweepReport:
    """Rows keyed by (snr_db, algorithm) in sweep order, plus the configuration header."""
    header: str
    rows: List[ReportRow] = field(default_factory=list)
    interrupted: bool = False

    def add(self, row: ReportRow) -> None:
        self.rows.append(row)

    def row(self, snr_db: float, algorithm: str, num_antennas: Optional[int] = None) -> ReportRow:
        for r in self.rows:
            if r.snr_db == snr_db and r.algorithm == algorithm and r.num_antennas == num_antennas:
                return r
        raise KeyError((snr_db, algorithm, num_antennas))

    def by_key(self) -> Dict[Tuple[float, str], ReportRow]:
        return {(r.snr_db, r.algorithm): r for r in self.rows}


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(report: SweepReport, destination: Union[str, Path], columns: Sequence[str]) -> Path:
    """UTF-8, LF line endings, a `# config:` comment line and then the header row."""
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as f:
        f.write(f"# config: {report.header}\n")
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in report.rows:
            values = row.to_dict()
            writer.writerow([_format(values[c]) for c in columns])
    return path
