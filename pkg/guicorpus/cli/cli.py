"""
Command-line interface.

    guicorpus <stage> [--config FILE] [--set section.key=value ...]
    guicorpus pipeline --config FILE

Stages: ingest, filter, segment, explore, annotate, unify, evaluate.
'pipeline' runs every stage whose inputs are configured. Flags win over the
config file, and the config file wins over the bundled defaults.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 completion
client failure.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from guicorpus.cli.pipeline import STAGES, Pipeline
from guicorpus.cli.pipeline_config import PipelineConfig
from guicorpus.config_loader import ConfigLoader
from guicorpus.exceptions import ConfigError, GuiCorpusError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guicorpus",
        description="Build GUI grounding and agent-step corpora from interface snapshots.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=STAGES + ("pipeline",), help="Stage to run, or 'pipeline' for all")
    parser.add_argument("--config", "-c", help="JSON config file merged over the bundled defaults")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="Override one config value (JSON or plain string); repeatable")
    parser.add_argument("--seed", type=int, help="Global seed")
    parser.add_argument("--workers", type=int, help="Worker processes for per-file stages")
    parser.add_argument("--output-dir", help="Directory receiving stage outputs and the run manifest")
    parser.add_argument("--log-level", choices=LOG_LEVELS, help="Logging level")
    return parser


def configure_logging(level: str) -> None:
    level = str(level).upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"logging.level must be one of {LOG_LEVELS}, got {level!r}")
    logging.basicConfig(format=LOG_FORMAT, level=level)
    logging.getLogger().setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs the command line.

    :param argv: Arguments without the program name; sys.argv by default.
    :return: Process exit code.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level or "INFO")
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    if args.output_dir:
        overrides.append(f"paths.output_dir={json.dumps(args.output_dir)}")
    try:
        raw = ConfigLoader.load(args.config, overrides)
        if not args.log_level:
            configure_logging(raw.get("logging", {}).get("level", "INFO"))
        pipeline = Pipeline(PipelineConfig.from_dict(raw))
        if args.command == "pipeline":
            results = pipeline.run_all()
        else:
            results = [pipeline.run(args.command)]
    except GuiCorpusError as error:
        logger.error("%s", error)
        return error.exit_code
    print(json.dumps({"manifest": pipeline.manifest.path, "stages": [result.to_dict() for result in results]},
                     indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
