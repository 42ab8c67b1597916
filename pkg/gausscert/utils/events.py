"""
Scan event utilities
Implements one-line event logging and label sanitization for reports
"""
import re
import logging

logger = logging.getLogger(__name__)

_CONTROL_CHARS = re.compile(r'[\x00-\x08\x0b-\x1f\x7f]')


def sanitize_label(label):
    """
    Sanitize a free-text state label before it reaches reports and CSV headers

    Args:
        label (str): Label read from a state file or command line

    Returns:
        str: Single-line label without control characters
    """
    if label is None:
        return ''
    if not isinstance(label, str):
        label = str(label)

    sanitized = _CONTROL_CHARS.sub('', label)
    sanitized = ' '.join(sanitized.split())
    return sanitized[:200]


def log_scan_event(event_type, level=logging.INFO, **details):
    """
    Log a scan lifecycle event as a single searchable line

    Args:
        event_type (str): Type of event, e.g. SCAN_STARTED
        level (int): Logging level
        **details: Non-sensitive key/value details
    """
    log_message = f"Scan Event: {event_type}"
    for key, value in details.items():
        if value is None:
            continue
        log_message += f" | {key}: {value}"

    logger.log(level, log_message)
