"""
Hahn Lab - Main Entry Point
Hahn difference operators, Nevanlinna tables and theorem checks from the command line
"""
import logging
import sys
from typing import Optional

from cli.commands import run
from core.config_manager import ConfigManager


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None):
    """Configure application logging; stdout stays reserved for data"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True
    )


def main():
    """Main application entry point"""
    config = ConfigManager("config.yaml").load()
    logging_config = config.get('logging', {})
    setup_logging(logging_config.get('level', 'WARNING'), logging_config.get('file'))
    logger = logging.getLogger(__name__)
    logger.info("Starting Hahn Lab")

    try:
        code = run(sys.argv[1:], config)
    except Exception as e:
        logger.error(f"Unhandled failure: {e}", exc_info=True)
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
