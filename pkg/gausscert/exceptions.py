"""
Exception hierarchy for gausscert
Every error carries the process exit code the CLI reports for it
"""


class GaussCertError(Exception):
    """Base class for all gausscert errors"""
    exit_code = 1


class InputError(GaussCertError):
    """Invalid user input: files, partitions, operators or settings"""
    exit_code = 1


class StateFormatError(InputError):
    """A covariance state file could not be parsed"""

    def __init__(self, message, row=None, column=None):
        location = ''
        if row is not None and column is not None:
            location = f' at entry ({row}, {column})'
        elif row is not None:
            location = f' at line {row}'
        super().__init__(f'{message}{location}')
        self.row = row
        self.column = column


class AsymmetryError(StateFormatError):
    """A covariance block is not symmetric within tolerance"""


class PartitionFormatError(InputError):
    """A partition is malformed"""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InvalidOperatorError(InputError):
    """A test operator is not symmetric positive definite"""


class ZeroErrorBarsError(InputError):
    """The propagated standard deviation of a witness vanishes"""


class ConditioningError(InputError):
    """A matrix square root met an indefinite block"""

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class ConfigValidationError(InputError):
    """A configuration mapping failed validation"""

    def __init__(self, errors, source='configuration'):
        self.errors = errors
        details = '; '.join(
            f"{field}: {', '.join(str(m) for m in messages)}" for field, messages in sorted(errors.items())
        )
        super().__init__(f'Invalid {source}: {details}')


class CapacityError(GaussCertError):
    """The requested enumeration exceeds the memory guard"""
    exit_code = 2


class StorageError(GaussCertError):
    """A state, report or checkpoint file could not be read or written"""
    exit_code = 3
