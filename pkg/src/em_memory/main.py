# em_memory/src/em_memory/main.py
"""
Point d'entrée principal pour em-memory.
Configure le logging puis délègue à la CLI.
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from typing import Optional, Sequence

from .config import (
    EXIT_IO,
    LOG_BACKUP_COUNT,
    LOG_ENCODING,
    LOG_FILENAME,
    LOG_MAX_BYTES,
    ensure_directories,
)
from .core.exceptions import ConfigError


def setup_logging(output_dir: Optional[str] = None):
    """
    Configure le système de logging.

    Sans output_dir, seule la console est configurée (erreurs de configuration).
    """
    logger = logging.getLogger("em_memory")
    logger.setLevel(logging.DEBUG)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    # Handler pour fichier avec rotation
    if output_dir is not None:
        logfile = os.path.join(ensure_directories(output_dir), LOG_FILENAME)
        handler = RotatingFileHandler(
            logfile, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUP_COUNT, encoding=LOG_ENCODING
        )
        formatter = logging.Formatter("%(asctime)s %(levelname)s [%(threadName)s] %(message)s")
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    # Handler pour console
    console = logging.StreamHandler()
    console.setLevel(logging.INFO)
    console.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.addHandler(console)

    return logger


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Point d'entrée principal."""
    from .cli import run
    from .settings import parse_config

    try:
        config = parse_config(argv)
    except ConfigError as e:
        logger = setup_logging()
        logger.error("Invalid configuration: %s", e)
        return e.exit_code

    try:
        logger = setup_logging(config.output_dir)
    except OSError as e:
        logger = setup_logging()
        logger.error("Cannot prepare output directory %s: %s", config.output_dir, e)
        return EXIT_IO
    logger.debug("Resolved configuration: %s", config.to_manifest())
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
