import logging
import os

__all__ = (
    "BLAS_THREAD_VARIABLES",
    "initialize_process",
    "is_initialized",
    "setup",
)

# One BLAS thread per pool worker.
BLAS_THREAD_VARIABLES = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
)

_initialized = False


def initialize_process(**environment) -> bool:
    """Set environment defaults and the terminal once per process.

    Must run before numpy is first imported for the BLAS defaults to apply.
    """
    global _initialized

    if _initialized:
        return False

    _initialized = True

    for key in BLAS_THREAD_VARIABLES:
        environment.setdefault(key, "1")

    for key, value in environment.items():
        os.environ.setdefault(key, str(value))

    if not os.environ.get("NO_TERM", False):
        from .util.system import initterm

        initterm()

    return True


def is_initialized() -> bool:
    return _initialized


def setup(source: str | None = __name__, **environment) -> None:
    """Initialize the environment and logging, then report the effective settings."""
    first = initialize_process(**environment)

    if first:
        from .logs import initialize_logging

        initialize_logging()

        logger = logging.getLogger(__name__)
        logger.debug("Process initialized by %r", source)

        from .settings import ConfigManager

        config_manager = ConfigManager()

        if not config_manager.config_path.exists():
            logger.debug("Config file %s does not exist. Using env and default settings.", config_manager.config_path)
            return

        config = config_manager.load_config()
        logger.debug("Config file %s loaded (seed=%d, threads=%d)", config_manager.config_path, config.seed, config.threads)
