"""
Exceptions shared by the whole package.

This module contains the base exception of tandemtail and the errors raised
by several modules at once: unstable models and unsupported laws.

"""


class TandemTailException(Exception):
    def __init__(self, message=None, details=None):
        """
        Initializes a TandemTailException.

        Args:
            message (str): The exception message.
            details (dict): Additional details about the exception.
        """
        super().__init__(message)
        self.details = details if details is not None else {}


class UnstableModelException(TandemTailException):
    def __init__(self, arrival_mean: float, service_mean: float):
        """
        Initializes an UnstableModelException.

        Raised when the mean inter-arrival time does not exceed the mean
        service time of some queue, so no stationary waiting time exists.

        Args:
            arrival_mean (float): Mean inter-arrival time.
            service_mean (float): The largest mean service time.
        """
        self.arrival_mean = arrival_mean
        self.service_mean = service_mean
        super().__init__(
            f"Unstable model: mean inter-arrival time {arrival_mean:g} "
            f"must exceed mean service time {service_mean:g}.",
            details={"arrival_mean": arrival_mean, "service_mean": service_mean},
        )


class UnsupportedDistributionException(TandemTailException):
    def __init__(self, kind: str, operation: str):
        """
        Initializes an UnsupportedDistributionException.

        Args:
            kind (str): The distribution kind that was rejected.
            operation (str): The operation that does not support it.
        """
        self.kind = kind
        self.operation = operation
        super().__init__(
            f"Distribution kind '{kind}' is not supported by {operation}.",
            details={"kind": kind, "operation": operation},
        )
