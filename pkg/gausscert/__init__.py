"""
gausscert application factory
Certifies multipartite entanglement of Gaussian states from covariance data
"""
import logging
from logging.handlers import RotatingFileHandler
import os

from config import config

__version__ = '1.0.0'

logger = logging.getLogger(__name__)


def create_app(config_name='development'):
    """
    Application factory pattern
    Resolves the configuration and prepares logging for a CLI session

    Args:
        config_name (str): Configuration environment name

    Returns:
        Config: Configuration object handed to every command
    """
    if config_name not in config:
        raise KeyError(f'Unknown configuration: {config_name}')
    app_config = config[config_name]()
    configure_logging(app_config)
    logger.debug(f'gausscert {__version__} initialized with {config_name} configuration')
    return app_config


def configure_logging(app_config):
    """
    Configure package logging

    Args:
        app_config (Config): Configuration object
    """
    package_logger = logging.getLogger('gausscert')
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
    level = getattr(logging, str(app_config.LOG_LEVEL).upper(), logging.WARNING)

    if app_config.LOG_TO_FILE and not app_config.TESTING:
        if not os.path.exists(app_config.LOG_DIR):
            os.mkdir(app_config.LOG_DIR)

        # Configure file handler with rotation
        file_handler = RotatingFileHandler(
            os.path.join(app_config.LOG_DIR, 'gausscert.log'),
            maxBytes=10240000,  # 10MB
            backupCount=10
        )
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        ))
        file_handler.setLevel(logging.INFO)
        package_logger.addHandler(file_handler)
        package_logger.setLevel(logging.INFO)
        package_logger.info('gausscert startup')
    else:
        # Console logging goes to stderr so reports on stdout stay clean
        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        package_logger.addHandler(console_handler)
        package_logger.setLevel(level)
