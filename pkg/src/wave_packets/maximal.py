"""
Dyadic Hardy-Littlewood maximal function on a uniform grid.
Window averages come from a prefix sum, so every radius costs O(n).
"""
import logging

import numpy as np

logger = logging.getLogger(__name__)


def _validate(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("maximal function of an empty vector")
    if np.any(g < 0):
        raise ValueError("maximal function expects a nonnegative vector")
    return g


def dyadic_radii(n: int) -> np.ndarray:
    """Half-widths 0, 1, 2, 4, ... in samples, up to the domain length"""
    top = int(np.ceil(np.log2(max(n, 2))))
    return np.concatenate(([0], 2 ** np.arange(top + 1)))


def maximal_function_all(g: np.ndarray) -> np.ndarray:
    """Dyadic maximal function at every index"""
    g = _validate(g)
    n = g.size
    prefix = np.concatenate(([0.0], np.cumsum(g)))
    idx = np.arange(n)
    best = g.copy()
    for k in dyadic_radii(n)[1:]:
        lo = np.clip(idx - k, 0, n)
        hi = np.clip(idx + k + 1, 0, n)
        # window length counts samples off the grid as zeros
        average = (prefix[hi] - prefix[lo]) / (2 * k + 1)
        np.maximum(best, average, out=best)
    return best


def maximal_function(g: np.ndarray, x_index: int) -> float:
    """
    Max over dyadic radii of the window average of g centred at x_index.

    Args:
        g: Nonnegative samples on a uniform grid
        x_index: Centre index

    Returns:
        Dyadic maximal function value
    """
    g = _validate(g)
    n = g.size
    if not 0 <= x_index < n:
        raise IndexError(f"index {x_index} outside grid of {n} samples")
    prefix = np.concatenate(([0.0], np.cumsum(g)))
    best = g[x_index]
    for k in dyadic_radii(n)[1:]:
        lo = max(0, x_index - k)
        hi = min(n, x_index + k + 1)
        best = max(best, (prefix[hi] - prefix[lo]) / (2 * k + 1))
    return float(best)
