"""
Encoding of tandemtail objects to JSON format.

This module provides a custom JSON encoder that converts tandemtail objects
(laws, reports, curves, configurations) to JSON by calling their to_dict
method, and numpy scalars and arrays to plain Python values.

"""

import json
import math

import numpy as np

SCHEMA_VERSION = 1


def json_float(value: float):
    """
    Returns value unchanged when finite, else the strings "inf", "-inf" or
    "nan", which strict JSON parsers accept.
    """
    value = float(value)
    if math.isfinite(value):
        return value
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


def parse_json_float(value) -> float:
    """Inverse of json_float; float() already parses "inf" and "nan"."""
    return float(value)


class ConfigJSONEncoder(json.JSONEncoder):
    """
    Encode objects to JSON by calling their to_dict method if available

    The class is derived from json.JSONEncoder and overrides its default
    method to call the to_dict method of objects that have it. numpy
    scalars and arrays, which the simulator and the curves produce, are
    converted to Python numbers and lists.

    Example:
        >>> import json
        >>> from tandemtail.distributions import Exponential
        >>> json.dumps(Exponential(1.0), cls=ConfigJSONEncoder)
        '{"kind": "exponential", "rate": 1.0}'

    """

    def default(self, o):
        """
        Encode object to JSON by calling its to_dict method if available

        :param o: object to encode
        :return: a JSON-serializable representation of the object
        """
        if hasattr(o, "to_dict"):
            return o.to_dict()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return json_float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super().default(o)


def dump_document(payload: dict, file) -> None:
    """
    Writes payload as a versioned JSON document.

    The schema version is prepended so that every document emitted by the
    package carries it at the top level.
    """
    document = {"schema_version": SCHEMA_VERSION, **payload}
    json.dump(document, file, indent=4, cls=ConfigJSONEncoder, ensure_ascii=False)
    file.write("\n")
