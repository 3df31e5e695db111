"""
Invariant suites checked against exhaustive oracles on random instances.

Suites: exactness of every exact detector, bounded-memory exactness with the ACTIVE
bound respected, optimal f-costs constant along the shortest path, consistency of the
optimal heuristic and the fewest-expansion limit of A* with that heuristic.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from src.baseline_detectors import sphere_decode
from src.core_linalg import RngStream
from src.lattice_model import (
    PSV,
    DetectionProblem,
    optimal_heuristic_oracle,
    preprocess,
    sample_scene,
    shortest_path_costs,
    successor_branch_costs,
)
from src.logging_system import get_run_logger
from src.tree_search import OracleHeuristic, ZeroHeuristic, astar, brute_force_ml, hats

from .config import OracleCheckConfig

run_logger = get_run_logger(__name__)

COST_TOLERANCE = 1e-9
MAX_REPORTED_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    allowed_failures: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.total - self.passed <= self.allowed_failures

    def record(self, passed: bool, detail: str) -> None:
        self.total += 1
        if passed:
            self.passed += 1
        elif len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(detail)


@dataclass
class OracleCheckReport:
    suites: Dict[str, SuiteResult]

    @property
    def all_passed(self) -> bool:
        return all(s.ok for s in self.suites.values())


def random_problem(cfg: OracleCheckConfig, instance: int) -> DetectionProblem:
    rng = RngStream(cfg.seed, instance)
    snr_db = float(rng.uniform(cfg.snr_low, cfg.snr_high))
    scene, _ = sample_scene(cfg.num_tx, cfg.num_tx, snr_db, rng)
    y, H = scene.widened()
    return preprocess(y, H)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= COST_TOLERANCE * max(1.0, abs(b))


def check_exactness(p: DetectionProblem, best: float, suite: SuiteResult, tag: str) -> None:
    results = {
        'astar-zero': astar(p, ZeroHeuristic()),
        'sd': sphere_decode(p),
        'hats-unbounded': hats(p, ZeroHeuristic()),
    }
    bad = [f"{name}={out.cost!r}" for name, out in results.items() if not (out.success and _close(out.cost, best))]
    suite.record(not bad, f"{tag}: ML cost {best!r}, got {', '.join(bad)}")


def check_bounded_memory(p: DetectionProblem, best: float, memory: int, suite: SuiteResult, tag: str) -> None:
    out = hats(p, ZeroHeuristic(), capacity=memory)
    ok = out.success and _close(out.cost, best) and out.stats.peak_active <= memory and out.stats.dead_ends == 0
    suite.record(ok, f"{tag}: M={memory} cost={out.cost!r} vs {best!r}, peak_active={out.stats.peak_active}, "
                     f"dead_ends={out.stats.dead_ends}")


def check_constant_optimal_f(p: DetectionProblem, suite: SuiteResult, tag: str) -> None:
    goal, f_costs = shortest_path_costs(p)
    target = f_costs[-1]
    ok = all(_close(f, target) for f in f_costs)
    suite.record(ok, f"{tag}: optimal f along the shortest path {np.round(f_costs, 12).tolist()}")


def check_consistency(p: DetectionProblem, depth: int, suite: SuiteResult, tag: str) -> None:
    """h*(x^k) <= b(x^{k+1}) + h*(x^{k+1}) for every node above `depth` and each child."""
    symbols = p.alphabet.symbols
    frontier = [PSV.root()]
    worst = 0.0
    for _ in range(min(depth, p.m)):
        next_frontier = []
        for node in frontier:
            h_node = optimal_heuristic_oracle(p, node)
            costs = successor_branch_costs(p, node)
            for idx, symbol in enumerate(symbols):
                child = node.child(symbol)
                next_frontier.append(child)
                worst = max(worst, h_node - (float(costs[idx]) + optimal_heuristic_oracle(p, child)))
        frontier = next_frontier
    suite.record(worst <= COST_TOLERANCE * max(1.0, optimal_heuristic_oracle(p, PSV.root())),
                 f"{tag}: consistency violated by {worst!r}")


def check_fewest_expansions(p: DetectionProblem, suite: SuiteResult, tag: str) -> None:
    out = astar(p, OracleHeuristic())
    suite.record(out.stats.expanded <= p.m + 1, f"{tag}: A* with h* expanded {out.stats.expanded} > {p.m + 1}")


def run_oracle_check(cfg: OracleCheckConfig) -> OracleCheckReport:
    """
    Run the invariant suites on cfg.instances random problems against exhaustive oracles.

    Args:
        cfg: Problem size, instance count, seed and suite tolerances

    Returns:
        OracleCheckReport with pass and failure counts per suite
    """
    run_logger.run_start("oracle_check", size=cfg.size, instances=cfg.instances, seed=cfg.seed, memory=cfg.memory)
    suites = {
        'exactness': SuiteResult('exactness'),
        'bounded-memory': SuiteResult('bounded-memory'),
        'optimal-f-constant': SuiteResult('optimal-f-constant'),
        'consistency': SuiteResult('consistency'),
        'fewest-expansions': SuiteResult('fewest-expansions', allowed_failures=cfg.expansion_tolerance),
    }
    checks: List[Callable[[DetectionProblem, float, str], None]] = [
        lambda p, best, tag: check_exactness(p, best, suites['exactness'], tag),
        lambda p, best, tag: check_bounded_memory(p, best, cfg.memory, suites['bounded-memory'], tag),
        lambda p, best, tag: check_constant_optimal_f(p, suites['optimal-f-constant'], tag),
        lambda p, best, tag: check_consistency(p, cfg.consistency_depth, suites['consistency'], tag),
        lambda p, best, tag: check_fewest_expansions(p, suites['fewest-expansions'], tag),
    ]
    for instance in range(cfg.instances):
        p = random_problem(cfg, instance)
        best = brute_force_ml(p).cost
        tag = f"instance {instance}"
        for check in checks:
            check(p, best, tag)

    report = OracleCheckReport(suites)
    for suite in suites.values():
        message = f"{suite.name}: {suite.passed}/{suite.total} passed (allowed failures {suite.allowed_failures})"
        if suite.ok:
            run_logger.run_info(message)
        else:
            run_logger.run_error(f"{message}; first failures: {suite.failures}")
    if report.all_passed:
        run_logger.run_success("all invariant suites passed", "oracle_check")
    return report
