"""Exception types with stable machine-readable error codes.

Every error carries a ``code`` string (e.g. ``"invalid-parameter"``,
``"prior-mismatch"``) that the CLI prints in its single-line error format
and maps to an exit code.
"""


class HopgrError(Exception):
    """Base class for all library errors."""

    exit_code = 2

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class DataError(HopgrError):
    """Invalid input data or parameters. CLI exit code 2."""

    exit_code = 2


class CompatibilityError(HopgrError):
    """Artifacts that cannot be combined (prior vs. bank, descriptor layouts).

    CLI exit code 3.
    """

    exit_code = 3


class StorageError(HopgrError):
    """Filesystem-level failure while reading or writing an artifact.

    CLI exit code 4.
    """

    exit_code = 4
