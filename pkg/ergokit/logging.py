import logging
import sys
from typing import Optional

logger = logging.getLogger("ergokit")
logger.addHandler(logging.NullHandler())


def configure_logging(
    filename: Optional[str] = None, verbose: bool = False
) -> logging.Logger:
    """Route ergokit log records somewhere a human can read them

    Stdout is reserved for dataset emission, so when no
    `filename` is given records go to stderr.
    """

    kwargs = {
        "level": logging.DEBUG if verbose else logging.INFO,
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    }
    if filename is not None:
        kwargs["filename"] = filename
        kwargs["filemode"] = "w"
    else:
        kwargs["stream"] = sys.stderr
    logging.basicConfig(**kwargs)
    return logger
