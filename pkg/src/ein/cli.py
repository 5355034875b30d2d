"""``ein`` command line.

    ein --config configs/synthetic.cfg run
    ein --config configs/synthetic.cfg analyze --out runs/analysis

Exit codes: 0 success, 2 invalid config or usage, 3 unreadable or invalid
input data, 4 failure inside a training/evaluation/analysis stage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigValidationError, load_config
from .experiment import (EXIT_CONFIG, EXIT_DATA, EXIT_OK, EXIT_STAGE, Manifest, StageError,
                         run_analysis, run_evaluate, run_experiment, run_prepare, run_projection,
                         run_train, stats_report)
from .neural.config import ConfigError

log = logging.getLogger("ein")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="experiment config file")
    p.add_argument("--seed", type=int, default=d, help="override the config seed")
    p.add_argument("--out", default=d, help="override output.dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ein", description="Emotion-infused false-information classifiers.")
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub.add_parser("prepare", parents=[common], help="preprocess, split and featurize the corpus")
    sub.add_parser("train", parents=[common], help="prepare, then train and save the model")
    sub.add_parser("evaluate", parents=[common], help="score a trained model on the test part")
    sub.add_parser("run", parents=[common], help="prepare, train and evaluate in one go")
    sub.add_parser("analyze", parents=[common], help="information gain, t-tests, top emotions, word lists")
    p = sub.add_parser("project", parents=[common], help="export penultimate vectors and a 2-D PCA projection")
    p.add_argument("--part", choices=("train", "validation", "test", "all"), default="test")
    p = sub.add_parser("stats", parents=[common], help="class counts and percentages of a corpus")
    p.add_argument("corpus", nargs="?", help="corpus file (default: corpus.path of --config)")
    p.add_argument("--format", choices=("jsonl", "csv"))
    return parser


def _config(args):
    if not args.config:
        raise ConfigValidationError("--config is required for this command")
    cfg = load_config(args.config, seed=args.seed, output_dir=args.out)
    cfg.validate()
    return cfg


def dispatch(args) -> object:
    cmd = args.command
    if cmd == "stats":
        if args.corpus:
            return stats_report(args.corpus, args.format)
        cfg = load_config(args.config, seed=args.seed) if args.config else None
        if cfg is None:
            raise ConfigValidationError("stats needs a corpus path or --config")
        return stats_report(cfg.corpus_path, args.format or cfg.corpus_format)
    cfg = _config(args)
    if cmd == "run":
        return run_experiment(cfg)
    if cmd == "analyze":
        return {k: v for k, v in run_analysis(cfg).items() if k in ("top_emotions", "notices")}
    if cmd == "project":
        return {"projection": str(run_projection(cfg, args.part))}
    manifest = Manifest(cfg, cmd)
    prep = run_prepare(cfg, manifest)
    if cmd == "prepare":
        result = {"documents": len(prep.corpus), "output": str(cfg.output_dir / "prepare")}
    elif cmd == "train":
        run_train(cfg, prep, manifest)
        result = {"output": str(cfg.output_dir)}
    else:
        result = run_evaluate(cfg, prep, manifest)
    manifest.finish()
    return result


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        result = dispatch(args)
    except (ConfigValidationError, ConfigError) as exc:
        print(f"ein: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"ein: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"ein: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last resort, keeps the exit code meaningful
        print(f"ein: unexpected failure: {exc}", file=sys.stderr)
        return EXIT_STAGE
    json.dump(result, sys.stdout, indent=2, sort_keys=True, ensure_ascii=False)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
