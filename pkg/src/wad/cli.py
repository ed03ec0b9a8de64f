"""Command-line harness wiring configuration to the library.

Subcommands: `gen` (write synthetic dataset files), `train` (run one or
more modes over a seed list), `eval` (score a checkpoint), `diag` (emit
the diagnostics document for a finished run).

Every run directory receives the resolved config snapshot so a run can be
replayed exactly; outputs carry no timestamps, so identical config + seed
reproduces identical bytes. Exit codes: 0 success, 2 configuration error,
3 runtime abort. `WAD_LOG` in {error, info, debug} controls verbosity.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io_ingest
from .curriculum import RUN_MODES, CurriculumConfig, annotate, run_wad
from .dataset import DatasetState
from .diagnostics import diagnostics_report
from .errors import ConfigError, WadError
from .student import TrainConfig, evaluate
from .synth_data import ScenarioConfig, generate
from .weighting import WeightFunctionSpec

logger = logging.getLogger("wad.cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


@dataclasses.dataclass
class ExperimentConfig:
    scenario_synthetic: ScenarioConfig | None
    scenario_paths: dict | None
    train: TrainConfig
    curriculum: CurriculumConfig
    weights: WeightFunctionSpec
    fixed_weight_value: float | None
    modes: list[str]
    output_dir: str
    seeds: list[int]
    lambda_l: float = 1.0
    lambda_mu: float = 1.0
    gamma: float = 0.05

    def to_snapshot(self) -> dict:
        scenario = (
            {"synthetic": dataclasses.asdict(self.scenario_synthetic)}
            if self.scenario_synthetic is not None
            else {"paths": dict(self.scenario_paths)}
        )
        weights = dataclasses.asdict(self.weights)
        weights["fixed_value"] = self.fixed_weight_value
        return {
            "scenario": scenario,
            "train": dataclasses.asdict(self.train),
            "curriculum": dataclasses.asdict(self.curriculum),
            "weights": weights,
            "mode": self.modes if len(self.modes) > 1 else self.modes[0],
            "output_dir": self.output_dir,
            "seeds": self.seeds,
            "lambda_l": self.lambda_l,
            "lambda_mu": self.lambda_mu,
            "gamma": self.gamma,
        }


def _build(cls, data: dict, path: str):
    """Construct a config dataclass, naming the offending field on error."""
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")
    try:
        return cls(**data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def parse_experiment_config(raw: dict, base_dir: Path) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object")
    known = {
        "scenario", "train", "curriculum", "weights", "mode", "output_dir",
        "seeds", "lambda_l", "lambda_mu", "gamma",
    }
    for key in raw:
        if key not in known:
            raise ConfigError(f"{key}: unknown section")

    scenario = raw.get("scenario")
    if not isinstance(scenario, dict) or ("synthetic" in scenario) == (
        "paths" in scenario
    ):
        raise ConfigError(
            "scenario: exactly one of scenario.synthetic / scenario.paths required"
        )
    synthetic = paths = None
    if "synthetic" in scenario:
        synthetic = _build(ScenarioConfig, scenario["synthetic"], "scenario.synthetic")
    else:
        paths = scenario["paths"]
        if not isinstance(paths, dict) or set(paths) != {"embeddings", "labels"}:
            raise ConfigError(
                "scenario.paths: must contain exactly 'embeddings' and 'labels'"
            )
        paths = {
            key: str((base_dir / value).resolve()) for key, value in paths.items()
        }
        for key, value in paths.items():
            if not Path(value).exists():
                raise ConfigError(f"scenario.paths.{key}: {value} does not exist")

    train = _build(TrainConfig, raw.get("train", {}), "train")
    if train.learning_rate <= 0:
        raise ConfigError("train.learning_rate: must be > 0")
    curriculum = _build(CurriculumConfig, raw.get("curriculum", {}), "curriculum")

    weights_raw = dict(raw.get("weights", {}))
    fixed_value = weights_raw.pop("fixed_value", None)
    if fixed_value is not None:
        try:
            fixed_value = float(fixed_value)
        except (TypeError, ValueError):
            raise ConfigError("weights.fixed_value: must be a number") from None
    weights = _build(WeightFunctionSpec, weights_raw, "weights")

    mode = raw.get("mode", "wad")
    modes = mode if isinstance(mode, list) else [mode]
    if not modes:
        raise ConfigError("mode: must name at least one run mode")
    for m in modes:
        if m not in RUN_MODES:
            raise ConfigError(f"mode: {m!r} not one of {RUN_MODES}")
    if len(set(modes)) != len(modes):
        raise ConfigError("mode: duplicate modes")

    seeds = raw.get("seeds", [0])
    if (
        not isinstance(seeds, list)
        or not seeds
        or not all(isinstance(s, int) and s >= 0 for s in seeds)
    ):
        raise ConfigError("seeds: must be a non-empty list of non-negative ints")

    for name in ("lambda_l", "lambda_mu", "gamma"):
        value = raw.get(name, {"lambda_l": 1.0, "lambda_mu": 1.0, "gamma": 0.05}[name])
        if not isinstance(value, (int, float)):
            raise ConfigError(f"{name}: must be a number")

    return ExperimentConfig(
        scenario_synthetic=synthetic,
        scenario_paths=paths,
        train=train,
        curriculum=curriculum,
        weights=weights,
        fixed_weight_value=fixed_value,
        modes=modes,
        output_dir=str(raw.get("output_dir", "runs")),
        seeds=list(seeds),
        lambda_l=float(raw.get("lambda_l", 1.0)),
        lambda_mu=float(raw.get("lambda_mu", 1.0)),
        gamma=float(raw.get("gamma", 0.05)),
    )


def load_config(path: str) -> ExperimentConfig:
    config_path = Path(path)
    try:
        raw = json.loads(config_path.read_text())
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}") from None
    return parse_experiment_config(raw, config_path.resolve().parent)


def _dataset_for_seed(config: ExperimentConfig, seed: int) -> DatasetState:
    if config.scenario_synthetic is not None:
        scenario = dataclasses.replace(config.scenario_synthetic, seed=seed)
        return generate(scenario)
    return io_ingest.load_dataset(
        config.scenario_paths["embeddings"], config.scenario_paths["labels"]
    )


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _final_sidecar(state: DatasetState, path: Path) -> None:
    roles = np.empty(state.n_instances, dtype=object)
    roles[state.labeled_idx] = "labeled"
    roles[state.unlabeled_idx] = "unlabeled"
    roles[state.test_idx] = "test"
    io_ingest.write_labels(
        path, roles, state.visible_labels, state.ground_truth, state.is_target
    )


def cmd_gen(config: ExperimentConfig, out_dir: Path) -> int:
    if config.scenario_synthetic is None:
        raise ConfigError("scenario.synthetic: required by the gen command")
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "config.json", config.to_snapshot())
    for seed in config.seeds:
        seed_dir = out_dir / f"seed_{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        state = _dataset_for_seed(config, seed)
        io_ingest.save_dataset(
            state, seed_dir / "embeddings.wade", seed_dir / "labels.csv"
        )
        logger.info(
            "seed %d: %d instances (%d labeled / %d unlabeled / %d test)",
            seed, state.n_instances, len(state.labeled_idx),
            len(state.unlabeled_idx), len(state.test_idx),
        )
    print(f"wrote {len(config.seeds)} dataset(s) under {out_dir}")
    return EXIT_OK


def cmd_train(config: ExperimentConfig, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "config.json", config.to_snapshot())
    summary: dict = {"modes": {}}
    for mode in config.modes:
        summary["modes"][mode] = {"per_seed": {}, "accuracies": []}
    for seed in config.seeds:
        seed_dir = out_dir / f"seed_{seed}"
        seed_dir.mkdir(parents=True, exist_ok=True)
        state = _dataset_for_seed(config, seed)
        if config.scenario_synthetic is not None:
            io_ingest.save_dataset(
                state, seed_dir / "embeddings.wade", seed_dir / "labels.csv"
            )
        train_cfg = dataclasses.replace(config.train, seed=seed)
        for mode in config.modes:
            mode_dir = seed_dir / mode
            mode_dir.mkdir(parents=True, exist_ok=True)
            params, history = run_wad(
                state,
                config.curriculum,
                train_cfg,
                config.weights,
                mode=mode,
                fixed_weight_value=config.fixed_weight_value,
            )
            io_ingest.save_checkpoint(mode_dir / "checkpoint.wadc", params)
            _final_sidecar(history.final_state, mode_dir / "labels_final.csv")
            with open(mode_dir / "history.jsonl", "w") as fh:
                for record in history.to_records():
                    fh.write(json.dumps(record, sort_keys=True) + "\n")
            accuracy = history.epochs[-1]["test_accuracy"]
            n_promoted = sum(p["n_selected"] for p in history.promotions)
            _write_json(
                mode_dir / "result.json",
                {
                    "seed": seed,
                    "mode": mode,
                    "final_accuracy": accuracy,
                    "n_promoted": n_promoted,
                    "files": {
                        "embeddings": "../embeddings.wade",
                        "labels_initial": "../labels.csv",
                        "labels_final": "labels_final.csv",
                        "checkpoint": "checkpoint.wadc",
                        "history": "history.jsonl",
                    },
                },
            )
            summary["modes"][mode]["per_seed"][str(seed)] = accuracy
            summary["modes"][mode]["accuracies"].append(accuracy)
            logger.info("seed %d mode %s: accuracy %.4f", seed, mode, accuracy)

    for mode, block in summary["modes"].items():
        acc = np.asarray(block.pop("accuracies"), dtype=np.float64)
        block["mean_accuracy"] = float(acc.mean())
        block["std_accuracy"] = float(acc.std())
    first = config.modes[0]
    if len(config.modes) > 1:
        deltas = {}
        for mode in config.modes[1:]:
            per_seed = {
                s: summary["modes"][mode]["per_seed"][s]
                - summary["modes"][first]["per_seed"][s]
                for s in map(str, config.seeds)
            }
            deltas[mode] = {
                "per_seed": per_seed,
                "mean": float(np.mean(list(per_seed.values()))),
            }
        summary[f"deltas_vs_{first}"] = deltas
    _write_json(out_dir / "summary.json", summary)

    print(f"{'mode':<26} {'mean acc':>9} {'std':>7}")
    for mode in config.modes:
        block = summary["modes"][mode]
        print(
            f"{mode:<26} {block['mean_accuracy']:>9.4f} {block['std_accuracy']:>7.4f}"
        )
    return EXIT_OK


def cmd_eval(config: ExperimentConfig, checkpoint: str, out_path: Path | None) -> int:
    params = io_ingest.load_checkpoint(checkpoint)
    state = _dataset_for_seed(config, config.seeds[0])
    test_x, test_y = state.test_set()
    accuracy = evaluate(params, test_x, test_y)
    report = {
        "checkpoint": str(checkpoint),
        "n_test": int(len(test_x)),
        "accuracy": accuracy,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    if out_path is not None:
        _write_json(out_path, report)
    return EXIT_OK


def cmd_diag(config: ExperimentConfig, run_dir: Path, out_path: Path | None) -> int:
    result = json.loads((run_dir / "result.json").read_text())
    files = result["files"]
    emb_path = (run_dir / files["embeddings"]).resolve()
    initial = io_ingest.load_dataset(emb_path, (run_dir / files["labels_initial"]).resolve())
    final = io_ingest.load_dataset(emb_path, (run_dir / files["labels_final"]).resolve())
    params = io_ingest.load_checkpoint(run_dir / files["checkpoint"])
    annotations = annotate(final, config.weights)
    report = diagnostics_report(
        params,
        final,
        annotations,
        initial_state=initial,
        weight_spec=config.weights,
        lambda_l=config.lambda_l,
        lambda_mu=config.lambda_mu,
        gamma=config.gamma,
    )
    report["run"] = {"mode": result["mode"], "seed": result["seed"]}
    payload = json.dumps(report, indent=2, sort_keys=True)
    print(payload)
    if out_path is not None:
        out_path.write_text(payload + "\n")
    return EXIT_OK


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wad",
        description="Weight-aware distillation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("gen", "train", "eval", "diag"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--seed", type=int, default=None, help="override seeds list")
        p.add_argument("--out", default=None, help="override output directory")
        if name == "eval":
            p.add_argument("--checkpoint", required=True)
        if name == "diag":
            p.add_argument(
                "--run", required=True, help="run directory containing result.json"
            )
    return parser


def main(argv=None) -> int:
    level = os.environ.get("WAD_LOG", "info").lower()
    if level not in ("error", "info", "debug"):
        print(f"WAD_LOG must be error, info or debug, got {level!r}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}[
            level
        ],
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = _make_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config.seeds = [args.seed]
        out_dir = Path(args.out) if args.out else Path(config.output_dir)
        if args.command == "gen":
            return cmd_gen(config, out_dir)
        if args.command == "train":
            return cmd_train(config, out_dir)
        if args.command == "eval":
            out = out_dir / "eval.json" if args.out else None
            if out is not None:
                out.parent.mkdir(parents=True, exist_ok=True)
            return cmd_eval(config, args.checkpoint, out)
        if args.command == "diag":
            out = out_dir / "diagnostics.json" if args.out else None
            if out is not None:
                out.parent.mkdir(parents=True, exist_ok=True)
            return cmd_diag(config, Path(args.run), out)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WadError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
