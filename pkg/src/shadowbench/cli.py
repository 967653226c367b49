"""Command-line interface.

Verbs: the four experiments plus bank management.

    shadowbench ghz-reconstruct     [--config PATH] [flags]
    shadowbench entropy-discrepancy [--config PATH] [flags]
    shadowbench error-vs-shots      [--config PATH] [flags]
    shadowbench crossover           [--config PATH] [flags]
    shadowbench bank generate --state ghz|pert|theta ... --out FILE
    shadowbench bank info FILE

Exit codes: 0 success, 2 configuration/usage error, 1 runtime failure.
On failure, the last stderr line is machine-readable JSON:
``{"error": {"code": "...", "message": "..."}}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, EXPERIMENTS, load_config
from .seeding import derive_rng


def _experiment_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None, help="key=value config file")
    sub.add_argument("--seed", type=int, default=None, help="master seed (u64)")
    sub.add_argument("--out", type=Path, default=None, help="output directory")
    sub.add_argument("--ensemble", choices=["pauli", "clifford", "both"], default=None)
    sub.add_argument("--shots", type=str, default=None,
                     help="comma-separated strictly increasing schedule")
    sub.add_argument("--epsilon", type=float, default=None)
    sub.add_argument("--replicas", type=int, default=None)
    sub.add_argument("--qubits", type=str, default=None, help="comma-separated sizes")
    sub.add_argument("--workers", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shadowbench",
        description="Classical-shadow estimation benchmarks for embedded entanglement witnesses",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sub = subs.add_parser(name, help=f"run the {name} experiment")
        _experiment_flags(sub)
    bank = subs.add_parser("bank", help="generate or inspect snapshot banks")
    bank_subs = bank.add_subparsers(dest="bank_command", required=True)
    gen = bank_subs.add_parser("generate", help="simulate and save a snapshot bank")
    gen.add_argument("--state", choices=["ghz", "pert", "theta"], required=True,
                     help="prepared state family")
    gen.add_argument("--qubits", type=int, required=True, help="register size N")
    gen.add_argument("--block", type=int, default=None,
                     help="entangled block size for pert/theta (default N)")
    gen.add_argument("--theta", type=float, default=0.0)
    gen.add_argument("--ensemble", choices=["pauli", "clifford"], required=True)
    gen.add_argument("--shots", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--label", type=str, default=None)
    gen.add_argument("--out", type=Path, required=True, help="bank file path")
    info = bank_subs.add_parser("info", help="print a bank file summary")
    info.add_argument("file", type=Path)
    return parser


def _overrides_from_args(args) -> dict:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = str(args.out)
    if args.ensemble is not None:
        overrides["ensembles"] = (["pauli", "clifford"] if args.ensemble == "both"
                                  else [args.ensemble])
    if args.shots is not None:
        overrides["shots"] = [int(v) for v in args.shots.split(",") if v.strip()]
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    if args.replicas is not None:
        overrides["replicas"] = args.replicas
    if args.qubits is not None:
        overrides["qubits"] = [int(v) for v in args.qubits.split(",") if v.strip()]
    if args.workers is not None:
        overrides["workers"] = args.workers
    return overrides


def _bank_state(args):
    from .states import basis_state, make_ghz, make_theta_family, tensor_pure
    from .witness import perturbed_target
    n = args.qubits
    block = args.block if args.block is not None else n
    if block > n:
        raise ConfigError(f"block {block} exceeds register size {n}")
    if args.state == "ghz":
        return make_ghz(n), f"ghz{n}"
    if args.state == "theta":
        blk = make_theta_family(block, args.theta)
        label = f"theta-family(n={block},theta={args.theta!r})"
    else:
        blk = perturbed_target(block, args.theta)
        label = f"pert(n={block},theta={args.theta!r})"
    if block < n:
        blk = tensor_pure(blk, basis_state(n - block))
        label += f"+pad{n - block}"
    return blk, label


def _cmd_bank_generate(args) -> int:
    from .shadows import generate_bank
    state, label = _bank_state(args)
    if args.label is not None:
        label = args.label
    rng = derive_rng(args.seed, 0, state.num_qubits,
                     0 if args.ensemble == "pauli" else 1)
    bank = generate_bank(state, args.ensemble, args.shots, rng,
                         label=label, master_seed=args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    bank.save(args.out)
    print(json.dumps({"written": str(args.out), "records": len(bank),
                      "ensemble": bank.ensemble, "qubits": bank.num_qubits,
                      "label": bank.source_state_label}, sort_keys=True))
    return 0


def _cmd_bank_info(args) -> int:
    from .shadows import SnapshotBank
    bank = SnapshotBank.load(args.file)
    print(json.dumps({"file": str(args.file), "ensemble": bank.ensemble,
                      "qubits": bank.num_qubits, "records": len(bank),
                      "seed": bank.master_seed, "label": bank.source_state_label},
                     sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "bank":
            if args.bank_command == "generate":
                return _cmd_bank_generate(args)
            return _cmd_bank_info(args)
        overrides = _overrides_from_args(args)
        overrides["experiment"] = args.command
        cfg = load_config(args.config, overrides)
        from .experiments import run_experiment
        rows, _ = run_experiment(cfg)
        print(json.dumps({"experiment": cfg.experiment, "rows": len(rows),
                          "out": str(cfg.out), "seed": cfg.seed,
                          "config_hash": cfg.config_hash()}, sort_keys=True))
        return 0
    except (ConfigError, FileNotFoundError) as exc:
        print(json.dumps({"error": {"code": "config", "message": str(exc)}}),
              file=sys.stderr)
        return 2
    except Exception as exc:
        print(json.dumps({"error": {"code": "runtime", "message": str(exc)}}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
