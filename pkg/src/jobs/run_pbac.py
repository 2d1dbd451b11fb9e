from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from src.cli import dispatch, parse_args
from src.core.errors import CsvSchemaError
from src.core.logger import get_logger

logger = get_logger(__name__)


def main(argv: list[str] | None = None) -> int:
    cmd = parse_args(argv)
    try:
        return dispatch(cmd)
    except CsvSchemaError as exc:
        logger.error("malformed input: %s", exc)
        return 1
    except Exception:
        logger.exception("%s failed", cmd.subcommand)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
