"""
Exceptions raised while computing decay rates and tail bounds.

"""

from tandemtail.exceptions.common import TandemTailException


class NoFeasibleThetaException(TandemTailException):
    def __init__(self, upper: float):
        """
        Initialize a NoFeasibleThetaException.

        Args:
            upper (float): The upper end of the searched interval (0, upper).
        """
        self.upper = upper
        super().__init__(
            f"No theta in (0, {upper:g}) satisfies E[exp(theta (Y - X))] < 1.",
            details={"upper": upper},
        )


class UnboundedDecayRateException(TandemTailException):
    def __init__(self, largest_t: float):
        """
        Initialize an UnboundedDecayRateException.

        Raised when E[exp(t (Y - X))] stays below 1 for every t tried, i.e.
        the increment is almost surely non-positive and the waiting time is 0.

        Args:
            largest_t (float): The largest t that was tried.
        """
        self.largest_t = largest_t
        super().__init__(
            f"E[exp(t (Y - X))] < 1 up to t = {largest_t:g}; the decay rate is unbounded.",
            details={"largest_t": largest_t},
        )
