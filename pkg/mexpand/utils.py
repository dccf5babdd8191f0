import time
from fractions import Fraction
from functools import wraps

import numpy as np
import orjson
from loguru import logger


def _default(obj):
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray) and np.iscomplexobj(obj):
        return [[float(v.real), float(v.imag)] for v in obj.ravel()]
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError


def dumps(obj) -> bytes:
    """Serialize to deterministic, indented JSON bytes.

    Keys are sorted, complex numbers become ``[re, im]`` pairs and rationals
    become strings, so equal inputs always give byte-identical output.
    """
    return orjson.dumps(
        obj,
        option=orjson.OPT_INDENT_2
        | orjson.OPT_SORT_KEYS
        | orjson.OPT_SERIALIZE_NUMPY
        | orjson.OPT_APPEND_NEWLINE,
        default=_default,
    )


def loads(data: bytes | str):
    return orjson.loads(data)


def as_complex(value) -> complex:
    """Parse a complex number given as a number, a ``[re, im]`` pair or a string."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return complex(value)


# Decorator to measure the execution time of a function
def execute_time_measure(key="default", decimals=4):
    def inner_decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.time()
            result = func(*args, **kwargs)
            delta = round(time.time() - start_time, decimals)
            logger.debug(f"[{key}] execution time: {delta} seconds")
            return result

        return wrapper

    return inner_decorator
