import logging.config

from config.settings import settings

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def logging_config(level: str) -> dict:
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {"generic": {"format": LOG_FORMAT}},
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "stream": "ext://sys.stderr",
                "level": "NOTSET",
                "formatter": "generic",
            }
        },
        "root": {"level": "WARNING", "handlers": ["console"]},
        "loggers": {
            name: {"level": level, "handlers": [], "propagate": True}
            for name in ("cli", "services", "repositories")
        },
    }


def setup_logging(level: str | None = None) -> None:
    """Console handler on stderr; stdout stays free for CLI output."""
    if settings.DEBUG:
        level = "DEBUG"
    level = (level or settings.LOG_LEVEL).upper()
    logging.config.dictConfig(logging_config(level))
