import logging
import os
import sys

# Configure the logging module; stdout is reserved for command output
logging.basicConfig(
    level=os.environ.get("UNIQCUBE_LOG_LEVEL", "WARNING").upper(),
    stream=sys.stderr,
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)

# Create a logger
logger = logging.getLogger("uniqcube")


def set_verbosity(verbose: bool) -> None:
    """Switches the shared logger between INFO and the environment default."""
    if verbose:
        logger.setLevel(logging.INFO)
