"""
Exceptions related to probability laws.

"""

from tandemtail.exceptions.common import TandemTailException


class InvalidParameterException(TandemTailException):
    def __init__(self, name: str, value):
        """
        Initialize an InvalidParameterException.

        Args:
            name (str): The name of the offending parameter.
            value: The rejected value.
        """
        self.name = name
        self.value = value
        super().__init__(
            f"Parameter '{name}' must be strictly positive and finite, got {value!r}.",
            details={"name": name, "value": value},
        )


class ConditioningOnNullException(TandemTailException):
    def __init__(self, kind: str, r: float):
        """
        Initialize a ConditioningOnNullException.

        Raised when a conditional expectation given R > r is requested but
        P(R > r) = 0.

        Args:
            kind (str): The distribution kind.
            r (float): The conditioning threshold.
        """
        self.kind = kind
        self.r = r
        super().__init__(
            f"Cannot condition a '{kind}' law on R > {r:g}: the event has probability 0.",
            details={"kind": kind, "r": r},
        )
