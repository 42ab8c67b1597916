"""
Configuration module for the gausscert toolkit
Implements environment-driven defaults for scans, error bars and logging
"""
import logging
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)


def _env_number(name, default, cast):
    """Read a numeric setting; malformed values fall back to the default with a warning"""
    value = os.environ.get(name)
    if value is None or value.strip() == '':
        return default
    try:
        return cast(value.strip())
    except ValueError:
        logger.warning(f'Ignoring {name}={value!r}: expected {cast.__name__}, using {default}')
        return default


def _env_int(name, default):
    return _env_number(name, default, int)


def _env_float(name, default):
    return _env_number(name, default, float)


class Config:
    """Base configuration class shared by every environment"""

    # Default error model for covariance files that carry no error bars
    DEFAULT_REL_ERR = _env_float('GAUSSCERT_REL_ERR', 1e-3)
    DEFAULT_ABS_ERR = _env_float('GAUSSCERT_ABS_ERR', 1e-4)

    # Reproducibility
    DEFAULT_SEED = _env_int('GAUSS_CERTIFY_SEED', 0)

    # Scan execution
    DEFAULT_JOBS = _env_int('GAUSSCERT_JOBS', os.cpu_count() or 1)
    MAX_FULL_ENUMERATION_MODES = 14
    CHECKPOINT_SUFFIX = '.checkpoint.jsonl'

    # Logging Configuration
    LOG_TO_FILE = os.environ.get('LOG_TO_FILE', 'False').lower() == 'true'
    LOG_DIR = os.environ.get('LOG_DIR', 'logs')
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'WARNING')

    DEBUG = False
    TESTING = False


class DevelopmentConfig(Config):
    """Development environment configuration"""
    DEBUG = True
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')


class ProductionConfig(Config):
    """Production configuration: long scans log to rotating files"""
    LOG_TO_FILE = True


class TestingConfig(Config):
    """Testing environment configuration"""
    TESTING = True
    DEFAULT_SEED = 0
    DEFAULT_JOBS = 1
    LOG_LEVEL = 'WARNING'


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
