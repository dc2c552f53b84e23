#!/usr/bin/env python3
"""
Main entry point for the treelike geodesic-distance audit toolkit
"""
import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from config import Config

# Configure logging
# Console logging (stderr; stdout carries the reports)
logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)

# Rotating file logging, only when a log file is configured
if Config.LOG_FILE:
    try:
        os.makedirs(os.path.dirname(Config.LOG_FILE) or '.', exist_ok=True)
        file_handler = RotatingFileHandler(
            Config.LOG_FILE, maxBytes=Config.LOG_MAX_BYTES, backupCount=Config.LOG_BACKUP_COUNT, encoding='utf-8'
        )
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        file_handler.setLevel(logging.INFO)
        logging.getLogger().addHandler(file_handler)
    except Exception as _e:
        logging.getLogger(__name__).warning(f"File logging disabled: {_e}")
logger = logging.getLogger(__name__)


def main() -> None:
    import cli

    if not Config.validate():
        logger.error("Invalid configuration. Exiting.")
        sys.exit(cli.EXIT_USAGE)
    sys.exit(cli.main())


if __name__ == "__main__":
    main()
