from tandemtail.exceptions.common import TandemTailException


class GridMismatchException(TandemTailException):
    def __init__(self, left_size: int, right_size: int):
        """
        Initialize a GridMismatchException.

        Args:
            left_size (int): Number of points of the bound curve.
            right_size (int): Number of points of the simulated curve.
        """
        super().__init__(
            "Curves must share the same x grid "
            f"(sizes {left_size} and {right_size}, or different abscissae).",
            details={"left_size": left_size, "right_size": right_size},
        )
