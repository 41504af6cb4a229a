"""
Exceptions related to run configuration files.

"""

from tandemtail.exceptions.common import TandemTailException


class InvalidConfigException(TandemTailException):
    def __init__(self, field: str, reason: str):
        """
        Initialize an InvalidConfigException.

        Args:
            field (str): The configuration field at fault.
            reason (str): Why the value was rejected.
        """
        self.field = field
        self.reason = reason
        super().__init__(
            f"Invalid configuration field '{field}': {reason}",
            details={"field": field, "reason": reason},
        )
