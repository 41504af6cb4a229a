"""
Tail curves.

A CcdfCurve is a grid of x values with, at every x, either an analytic bound
on P(W > x) (standard error 0) or a Monte Carlo estimate with its standard
error. Curves are written as CSV rows "x,value,stderr,kind" or as JSON.

"""

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, TextIO

import numpy as np

CSV_HEADER = ("x", "value", "stderr", "kind")


class CurveKind(Enum):
    POLYEXP = "polyexp-bound"
    SOJOURN = "sojourn-bound"
    LD = "ld-bound"
    KINGMAN = "kingman"
    ROSS = "ross"
    SIMULATION = "simulation"


def _format(value: float) -> str:
    return format(float(value), ".17g")


@dataclass(frozen=True)
class CcdfCurve:
    """
    A tail curve on a strictly increasing grid.

    Attributes:
        kind (CurveKind): Which bound or estimator produced the values.
        xs (np.ndarray): Grid points, strictly increasing and non-negative.
        values (np.ndarray): Tail values, each in [0, 1].
        stderrs (np.ndarray): Standard errors, zero for analytic curves.
    """

    kind: CurveKind
    xs: np.ndarray
    values: np.ndarray
    stderrs: np.ndarray

    def __post_init__(self):
        if not isinstance(self.kind, CurveKind):
            raise TypeError("kind must be a CurveKind")
        xs = np.asarray(self.xs, dtype=float)
        values = np.asarray(self.values, dtype=float)
        stderrs = np.asarray(self.stderrs, dtype=float)
        if not xs.shape == values.shape == stderrs.shape or xs.ndim != 1:
            raise ValueError("xs, values and stderrs must be 1-D arrays of equal length")
        if xs.size and (np.any(np.diff(xs) <= 0) or xs[0] < 0):
            raise ValueError("xs must be non-negative and strictly increasing")
        if np.any((values < 0) | (values > 1)):
            raise ValueError("values must lie in [0, 1]")
        if np.any(stderrs < 0):
            raise ValueError("stderrs must be non-negative")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "stderrs", stderrs)

    @classmethod
    def analytic(cls, kind: "CurveKind", xs: Sequence[float], values: Sequence[float]) -> "CcdfCurve":
        values = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
        return cls(kind, np.asarray(xs, dtype=float), values, np.zeros_like(values))

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.xs.tolist(), self.values.tolist(), self.stderrs.tolist()))

    def __len__(self) -> int:
        return int(self.xs.size)

    def csv_rows(self) -> list[list[str]]:
        return [
            [_format(x), _format(value), _format(stderr), self.kind.value]
            for x, value, stderr in self.points
        ]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "points": [
                {"x": x, "value": value, "stderr": stderr} for x, value, stderr in self.points
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CcdfCurve":
        points = data["points"]
        return cls(
            CurveKind(data["kind"]),
            np.array([p["x"] for p in points], dtype=float),
            np.array([p["value"] for p in points], dtype=float),
            np.array([p["stderr"] for p in points], dtype=float),
        )


def write_csv(curves: Iterable[CcdfCurve], file: TextIO) -> None:
    """
    Writes one or more curves as CSV with the header "x,value,stderr,kind".

    Args:
        curves (Iterable[CcdfCurve]): Curves, written in the given order.
        file (TextIO): An open text file.
    """
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for curve in curves:
        writer.writerows(curve.csv_rows())


def read_csv(file: TextIO) -> list[CcdfCurve]:
    """
    Reads curves written by write_csv, grouped by kind in order of appearance.

    Raises:
        ValueError: If the header is not "x,value,stderr,kind".
    """
    reader = csv.reader(file)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ValueError(f"Expected CSV header {','.join(CSV_HEADER)}")
    grouped: dict[str, list[tuple[float, float, float]]] = {}
    for x, value, stderr, kind in reader:
        grouped.setdefault(kind, []).append((float(x), float(value), float(stderr)))
    curves = []
    for kind, rows in grouped.items():
        xs, values, stderrs = (np.array(column) for column in zip(*rows))
        curves.append(CcdfCurve(CurveKind(kind), xs, values, stderrs))
    return curves
