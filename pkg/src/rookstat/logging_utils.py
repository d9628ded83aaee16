import logging
from pathlib import Path
from typing import Optional


def setup_logging(log_dir: Optional[str], *, name: Optional[str] = None, verbose: bool = False) -> logging.Logger:
    logger = logging.getLogger(name or "rookstat")
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)

    formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")

    handlers = []
    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(Path(log_dir) / "rookstat.log")
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)
        handlers.append(file_handler)

    # stderr only: stdout carries the command output
    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(formatter)
    stream_handler.setLevel(logging.DEBUG if verbose else logging.WARNING)
    handlers.append(stream_handler)

    logger.handlers = handlers
    logger.propagate = False

    return logger
