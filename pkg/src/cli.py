import argparse
import asyncio
import sys
from collections.abc import Sequence
from datetime import date
from pathlib import Path

from config import ConfigError, load_run_config, logger
from pipeline import cmd_all, cmd_build, cmd_harvest, cmd_impact, cmd_report
from utils.validators import validate_iso_date

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS = {
    "harvest": cmd_harvest,
    "build": cmd_build,
    "report": cmd_report,
    "impact": cmd_impact,
    "all": cmd_all,
}


def _iso_date(raw: str) -> date:
    is_valid, error = validate_iso_date(raw)
    if not is_valid:
        raise argparse.ArgumentTypeError(error)
    return date.fromisoformat(raw.strip())


def _on_off(raw: str) -> bool:
    if raw not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return raw == "on"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="файл key = value; флаги имеют приоритет")
    common.add_argument("--roster", dest="roster_path", type=Path)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--fixtures", dest="fixture_dir", type=Path, metavar="DIR")
    mode.add_argument("--live", action="store_const", const=True, default=None)
    common.add_argument("--country", dest="country_code", type=str.upper, metavar="CC")
    common.add_argument("--match-percentage", dest="match_percentage", type=float)
    common.add_argument("--discrepancy-threshold", dest="discrepancy_threshold", type=float)
    common.add_argument(
        "--one-sided-discrepancy",
        dest="one_sided_discrepancy",
        action="store_const",
        const=True,
        default=None,
    )
    common.add_argument("--law-date", dest="law_date", type=_iso_date, metavar="YYYY-MM-DD")
    common.add_argument("--window-start", dest="window_start", type=_iso_date, metavar="YYYY-MM-DD")
    common.add_argument("--cutoff", dest="cutoff", type=_iso_date, metavar="YYYY-MM-DD")
    common.add_argument("--out", dest="output_dir", type=Path, metavar="DIR")
    common.add_argument("--month-effects", dest="include_month_effects", type=_on_off, metavar="on|off")
    common.add_argument("--concurrency", type=int)
    common.add_argument("--audit", action="store_const", const=True, default=None)

    parser = argparse.ArgumentParser(
        prog="oa-monitor",
        description="Мониторинг открытого доступа: сбор из OpenAlex, корпус, отчёты и оценка эффекта закона",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, object]:
    overrides = {key: value for key, value in vars(args).items() if key not in ("command", "config")}
    # Флаг --fixtures выключает live из файла конфигурации
    if args.fixture_dir is not None:
        overrides["live"] = False
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = load_run_config(args.config, _overrides(args))
        logger.info(f"Running '{args.command}' in {cfg.mode} mode, config {cfg.config_hash()[:12]}")
        asyncio.run(COMMANDS[args.command](cfg))
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"'{args.command}' failed: {e}")
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
