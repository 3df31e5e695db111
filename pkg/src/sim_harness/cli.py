"""
Command-line entry point: hats <subcommand> [flags].

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

from src.core_linalg import RngStream
from src.errors import ConfigError, HatsError, MissingModel
from src.lattice_model import ComplexScene, sample_scene
from src.logging_system import get_run_logger, setup_logging
from src.neural_heuristic import (
    DESK_LEARNING_RATE,
    REFERENCE_LEARNING_RATE,
    TrainConfig,
    heldout_set,
    mean_abs_error,
    save_loss_trace,
    save_model,
    train,
)
from src.tree_search import SuccessorOrder

from .config import (
    ALGORITHMS,
    DEFAULT_MODEL_DIR,
    OracleCheckConfig,
    ScalingConfig,
    SweepConfig,
    model_filename,
    parse_int_list,
    parse_memory,
    parse_snr_range,
)
from .oracle_check import run_oracle_check
from .sweeps import sweep_ber, sweep_complexity, sweep_scaling
from .trials import TrialParams, cached_model, detect, estimate_bits

run_logger = get_run_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _algorithms(text: str) -> tuple:
    return tuple(a.strip() for a in text.split(',') if a.strip())


def _learning_rate(text: str) -> float:
    presets = {'reference': REFERENCE_LEARNING_RATE, 'desk': DESK_LEARNING_RATE}
    if text in presets:
        return presets[text]
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad learning rate {text!r}; expected 'reference', 'desk' or a number")


def _add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--memory", default="inf", help="ACTIVE bound M for hats ('inf' for unbounded)")
    parser.add_argument("--model", default=None, help="trained model file for the learned heuristic")
    parser.add_argument("--order", choices=[o.value for o in SuccessorOrder], default=SuccessorOrder.BRANCH_COST.value,
                        help="successor generation order")
    parser.add_argument("--no-final-relu", action="store_true", help="evaluate the model without the output rectifier")


def _add_sweep_flags(parser: argparse.ArgumentParser, default_out: str) -> None:
    parser.add_argument("--nt", type=int, default=4, help="transmit antennas")
    parser.add_argument("--nr", type=int, default=4, help="receive antennas")
    parser.add_argument("--snr", default="5:15:2.5", help="SNR points in dB, lo:hi:step or a single value")
    parser.add_argument("--trials", type=int, default=1000, help="trials per SNR point")
    parser.add_argument("--algos", default="sd,astar-zero", help=f"comma-separated subset of {','.join(ALGORITHMS)}; hats and hats-zero accept @M or @inf, e.g. hats@128,hats@inf")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=default_out, help="CSV output path")
    parser.add_argument("--target-errors", type=int, default=None, help="stop a point once every algorithm has this many bit errors")
    parser.add_argument("--max-bits", type=int, default=None, help="stop a point after this many bits per algorithm")
    parser.add_argument("--workers", type=int, default=None, help="worker processes (default $HATS_THREADS or CPU count)")
    _add_search_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hats", description="Heuristic tree search MIMO detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train the learned heuristic")
    p_train.add_argument("--nt", type=int, default=8)
    p_train.add_argument("--nr", type=int, default=8)
    p_train.add_argument("--snr", default="5:15:1", help="training SNR range in dB (lo:hi:step or a single value)")
    p_train.add_argument("--slots", type=int, default=128, help="time slots T per minibatch")
    p_train.add_argument("--batches", type=int, default=105, help="dataset batches B")
    p_train.add_argument("--epochs", type=int, default=20, help="SGD steps per dataset batch")
    p_train.add_argument("--lr", default="desk", help="'reference' (1e-6), 'desk' (1e-4) or a number")
    p_train.add_argument("--hidden", default="128,64,32,16", help="hidden layer sizes")
    p_train.add_argument("--include-goal-level", action="store_true", help="also supervise level-m nodes")
    p_train.add_argument("--no-final-relu", action="store_true", help="no rectifier on the output layer")
    p_train.add_argument("--heldout", type=int, default=64, help="held-out time slots for evaluation")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", default=None, help=f"model path (default {DEFAULT_MODEL_DIR}/hats_NTxNR.bin)")
    p_train.add_argument("--trace", default=None, help="write the step,loss trace here")

    p_detect = sub.add_parser("detect", help="detect one instance from a scene file or a seed")
    p_detect.add_argument("--scene", default=None, help="JSON scene with H_real, H_imag, y_real, y_imag [, x_real, x_imag]")
    p_detect.add_argument("--nt", type=int, default=4)
    p_detect.add_argument("--nr", type=int, default=4)
    p_detect.add_argument("--snr", type=float, default=10.0)
    p_detect.add_argument("--seed", type=int, default=0)
    p_detect.add_argument("--algo", choices=ALGORITHMS, default="sd")
    _add_search_flags(p_detect)

    _add_sweep_flags(sub.add_parser("sweep-ber", help="BER versus SNR"), "ber.csv")
    _add_sweep_flags(sub.add_parser("sweep-complexity", help="visited nodes versus SNR"), "complexity.csv")

    p_scaling = sub.add_parser("sweep-scaling", help="visited nodes versus antenna count")
    p_scaling.add_argument("--sizes", default="4,6,8", help="square antenna counts")
    p_scaling.add_argument("--snr", type=float, default=15.0)
    p_scaling.add_argument("--trials", type=int, default=500)
    p_scaling.add_argument("--algos", default="astar-zero,hats", help="as for sweeps, e.g. astar-zero,hats@128,hats@inf")
    p_scaling.add_argument("--seed", type=int, default=0)
    p_scaling.add_argument("--model-dir", default=DEFAULT_MODEL_DIR, help="directory holding hats_NxN.bin models")
    p_scaling.add_argument("--out", default="scaling.csv")
    p_scaling.add_argument("--workers", type=int, default=None)
    p_scaling.add_argument("--memory", default="inf")
    p_scaling.add_argument("--order", choices=[o.value for o in SuccessorOrder], default=SuccessorOrder.BRANCH_COST.value)
    p_scaling.add_argument("--no-final-relu", action="store_true")

    p_oracle = sub.add_parser("oracle-check", help="run the invariant suites against exhaustive oracles")
    p_oracle.add_argument("--size", type=int, default=8, help="real dimension m = 2*Nt")
    p_oracle.add_argument("--instances", type=int, default=200)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--memory-slack", type=int, default=1, help="bounded runs use M = m + 1 + slack")
    p_oracle.add_argument("--consistency-depth", type=int, default=8)

    return parser


def cmd_train(args) -> int:
    snr = parse_snr_range(args.snr)
    cfg = TrainConfig(
        num_tx=args.nt, num_rx=args.nr, snr_low=min(snr), snr_high=max(snr),
        minibatch_time_slots=args.slots, num_batches=args.batches, epochs=args.epochs,
        learning_rate=_learning_rate(args.lr), hidden_layers=parse_int_list(args.hidden, "hidden layer"),
        include_goal_level=args.include_goal_level, final_relu=not args.no_final_relu,
        heldout_time_slots=args.heldout, seed=args.seed,
    )
    out = Path(args.out) if args.out else Path(DEFAULT_MODEL_DIR) / model_filename(args.nt, args.nr)
    trace: List = []
    model = train(cfg, trace=trace)
    save_model(model, out)
    run_logger.run_info(f"model saved to {out}")
    if args.trace:
        save_loss_trace(trace, args.trace)
        run_logger.run_info(f"loss trace saved to {args.trace}")
    if cfg.heldout_time_slots > 0:
        held = heldout_set(cfg)
        untrained = train(cfg.model_copy(update={'num_batches': 0}))
        run_logger.run_info(f"held-out mean |f - g(label)|: untrained {mean_abs_error(untrained, held):.4g}, "
                            f"trained {mean_abs_error(model, held):.4g}")
    return EXIT_OK


def _read_scene(path: str):
    """(y, H, x or None) as real-valued arrays from a JSON scene file."""
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
        Hc = np.asarray(data['H_real'], dtype=np.float64) + 1j * np.asarray(data['H_imag'], dtype=np.float64)
        yc = np.asarray(data['y_real'], dtype=np.float64) + 1j * np.asarray(data['y_imag'], dtype=np.float64)
        xc = None
        if 'x_real' in data and 'x_imag' in data:
            xc = np.asarray(data['x_real'], dtype=np.float64) + 1j * np.asarray(data['x_imag'], dtype=np.float64)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"cannot read scene {path}: {e}")
    return ComplexScene(Hc=Hc, xc=xc, wc=None, yc=yc, rho=float('nan'))


def cmd_detect(args) -> int:
    if args.scene:
        scene = _read_scene(args.scene)
    else:
        scene, _ = sample_scene(args.nt, args.nr, args.snr, RngStream(args.seed))
    y, H = scene.widened()
    model = None
    if args.algo == 'hats':
        if args.model is None:
            raise MissingModel("algorithm 'hats' needs --model")
        model = cached_model(args.model, not args.no_final_relu, H.shape[1])
    params = TrialParams(memory=parse_memory(args.memory), order=SuccessorOrder(args.order), model=model)
    p, outcome = detect(args.algo, y, H, params)

    result = {'algorithm': args.algo, 'success': outcome.success, 'cost': outcome.cost,
              'stats': outcome.stats.to_dict()}
    if outcome.success:
        x = p.to_natural(outcome.estimate)
        nt = H.shape[1] // 2
        result['estimate_real'] = x[:nt].tolist()
        result['estimate_imag'] = x[nt:].tolist()
        if scene.xc is not None:
            truth = estimate_bits(scene.x)
            result['bits'] = int(truth.size)
            result['bit_errors'] = int(np.count_nonzero(estimate_bits(x) != truth))
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK if outcome.success else EXIT_RUNTIME


def _sweep_config(args) -> SweepConfig:
    return SweepConfig(
        num_tx=args.nt, num_rx=args.nr, snr_list=parse_snr_range(args.snr), trials=args.trials,
        algorithms=_algorithms(args.algos), memory=parse_memory(args.memory), model_path=args.model,
        final_relu=not args.no_final_relu, order=SuccessorOrder(args.order), seed=args.seed,
        target_errors=args.target_errors, max_bits=args.max_bits, out=args.out,
    )


def cmd_sweep_ber(args) -> int:
    sweep_ber(_sweep_config(args), args.workers)
    return EXIT_OK


def cmd_sweep_complexity(args) -> int:
    sweep_complexity(_sweep_config(args), args.workers)
    return EXIT_OK


def cmd_sweep_scaling(args) -> int:
    cfg = ScalingConfig(
        sizes=parse_int_list(args.sizes, "antenna size"), snr_db=args.snr, trials=args.trials,
        algorithms=_algorithms(args.algos), memory=parse_memory(args.memory), model_dir=args.model_dir,
        final_relu=not args.no_final_relu, order=SuccessorOrder(args.order), seed=args.seed, out=args.out,
    )
    sweep_scaling(cfg, args.workers)
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    cfg = OracleCheckConfig(size=args.size, instances=args.instances, seed=args.seed,
                            memory_slack=args.memory_slack, consistency_depth=args.consistency_depth)
    report = run_oracle_check(cfg)
    return EXIT_OK if report.all_passed else EXIT_RUNTIME


COMMANDS = {
    'train': cmd_train,
    'detect': cmd_detect,
    'sweep-ber': cmd_sweep_ber,
    'sweep-complexity': cmd_sweep_complexity,
    'sweep-scaling': cmd_sweep_scaling,
    'oracle-check': cmd_oracle_check,
}


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_CONFIG

    run_logger.run_start(args.command, **{k: v for k, v in vars(args).items() if k != 'command'})
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValidationError, MissingModel) as e:
        run_logger.run_error(f"configuration error: {e}")
        return EXIT_CONFIG
    except HatsError as e:
        run_logger.run_error(f"{type(e).__name__}: {e}", exc_info=True)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        run_logger.run_warning("interrupted")
        return EXIT_RUNTIME
    except Exception as e:
        run_logger.run_error(f"unexpected failure: {e}", exc_info=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
