"""
Exceptions related to tandem sample paths.

"""

from tandemtail.exceptions.common import TandemTailException


class DimensionMismatchException(TandemTailException):
    def __init__(self, n_inter_arrivals: int, n_jobs: int):
        """
        Initialize a DimensionMismatchException.

        Args:
            n_inter_arrivals (int): Length of the inter-arrival sequence.
            n_jobs (int): Number of jobs given by the service matrix.
        """
        self.n_inter_arrivals = n_inter_arrivals
        self.n_jobs = n_jobs
        super().__init__(
            f"{n_jobs} jobs need {max(n_jobs - 1, 0)} inter-arrival times, "
            f"got {n_inter_arrivals}.",
            details={"n_inter_arrivals": n_inter_arrivals, "n_jobs": n_jobs},
        )


class TooLargeException(TandemTailException):
    def __init__(self, n_jobs: int, n_queues: int, max_jobs: int, max_queues: int):
        """
        Initialize a TooLargeException.

        Args:
            n_jobs (int): Requested number of jobs.
            n_queues (int): Requested number of queues.
            max_jobs (int): Largest supported number of jobs.
            max_queues (int): Largest supported number of queues.
        """
        self.n_jobs = n_jobs
        self.n_queues = n_queues
        super().__init__(
            f"Brute force supports at most {max_jobs} jobs and {max_queues} queues, "
            f"got {n_jobs} jobs and {n_queues} queues.",
            details={"n_jobs": n_jobs, "n_queues": n_queues},
        )
