"""General helpers."""
from itertools import combinations
from typing import List, Union

import numpy as np

Cell = Union[None, bool, int, float, str]


def format_number(value: Cell) -> str:
    """
    Format a table cell for CSV output.

    Floats are written with 12 significant digits and '.' as decimal separator,
    booleans as 1/0 and missing values as an empty cell.

    :param value: The cell value.
    :type value: Cell
    :return: The formatted cell.
    :rtype: str
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if number == 0.0:
            return "0"
        return f"{number:.12g}"
    return str(value)


def is_valid_float_list(text: str, length: int = None) -> bool:
    """
    Check if a comma separated string holds finite floats.

    :param text: The string to be validated, e.g. "3,-1,1,4".
    :type text: str
    :param length: Required number of entries (None accepts any).
    :type length: int
    :return: True if every entry parses to a finite float, False otherwise.
    :rtype: bool
    """
    try:
        values = parse_float_list(text)
    except ValueError:
        return False
    if length is not None and len(values) != length:
        return False
    return all(np.isfinite(values))


def parse_float_list(text: str) -> List[float]:
    """
    Parse a comma separated string into floats.

    :param text: The string, e.g. "0.25,0.5,0.75".
    :type text: str
    :return: The parsed values.
    :rtype: List[float]
    """
    return [float(item) for item in text.split(",") if item.strip()]


def linear_grid(start: float, stop: float, steps: int) -> np.ndarray:
    """
    Evenly spaced grid including both ends; a single step yields ``[start]``.

    :param start: First grid point.
    :type start: float
    :param stop: Last grid point.
    :type stop: float
    :param steps: Number of points.
    :type steps: int
    :return: The grid.
    :rtype: np.ndarray
    """
    if steps == 1:
        return np.array([float(start)])
    return np.linspace(start, stop, steps)


def geometric_grid(start: float, stop: float, points: int) -> np.ndarray:
    """
    Log-spaced grid between two positive numbers.

    :param start: First grid point (> 0).
    :type start: float
    :param stop: Last grid point (> start).
    :type stop: float
    :param points: Number of points.
    :type points: int
    :return: The grid.
    :rtype: np.ndarray
    """
    return np.geomspace(start, stop, points)


def simplex_grid(n: int, k: int) -> np.ndarray:
    """
    Enumerate the k-grid of the (n-1)-simplex.

    Every row is a probability vector whose entries are multiples of 1/k, built
    by stars and bars so the enumeration order is deterministic.

    :param n: Number of states.
    :type n: int
    :param k: Grid resolution.
    :type k: int
    :return: Array of shape (C(k+n-1, n-1), n).
    :rtype: np.ndarray
    """
    rows = []
    for bars in combinations(range(k + n - 1), n - 1):
        edges = (-1,) + bars + (k + n - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(n)])
    return np.asarray(rows, dtype=float) / k
