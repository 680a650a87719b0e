"""
Chirp-z evaluation of exponential sums on uniform grids.

Computes S[k] = sum_n a[n] * exp(i*sign*u_n*y_k) for u_n = u0 + n*du and
y_k = y0 + k*dy with a Bluestein convolution. Quadratic phases are built
from exact integer squares so accuracy does not degrade with length.
"""
from typing import Optional
import logging

import numpy as np
from scipy import fft as sp_fft

logger = logging.getLogger(__name__)


def _quadratic_phase(count: int, phi: float, offset: int = 0) -> np.ndarray:
    k = np.arange(offset, offset + count, dtype=np.float64)
    return np.exp(0.5j * phi * (k * k))


def chirp_sum(
    values: np.ndarray,
    u0: float,
    du: float,
    y0: float,
    dy: float,
    count: int,
    sign: int = 1,
    workers: Optional[int] = None,
) -> np.ndarray:
    """
    Evaluate sum_n values[..., n] * exp(i*sign*(u0 + n*du)*(y0 + k*dy)).

    Args:
        values: Coefficients, summed along the last axis (leading axes batch)
        u0, du: Start and step of the summation variable
        y0, dy: Start and step of the output variable
        count: Number of output points
        sign: +1 or -1
        workers: Threads handed to scipy.fft

    Returns:
        Array with the last axis replaced by `count` outputs
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[-1]
    if n == 0 or count <= 0:
        return np.zeros(values.shape[:-1] + (max(count, 0),), dtype=complex)
    s = float(np.sign(sign)) or 1.0
    phi = s * du * dy

    n_idx = np.arange(n, dtype=np.float64)
    k_idx = np.arange(count, dtype=np.float64)
    pre = np.exp(1j * s * du * y0 * n_idx) * _quadratic_phase(n, phi)
    post = np.exp(1j * s * u0 * (y0 + dy * k_idx)) * _quadratic_phase(count, phi)

    length = sp_fft.next_fast_len(n + count - 1)
    # kernel c[j] = exp(-i*phi*j^2/2) for j = -(n-1) .. count-1, wrapped
    kernel = np.zeros(length, dtype=complex)
    kernel[:count] = np.conj(_quadratic_phase(count, phi))
    if n > 1:
        kernel[length - (n - 1):] = np.conj(_quadratic_phase(n - 1, phi, offset=-(n - 1)))

    spectrum = sp_fft.fft(values * pre, n=length, axis=-1, workers=workers)
    spectrum *= sp_fft.fft(kernel, workers=workers)
    conv = sp_fft.ifft(spectrum, axis=-1, workers=workers)[..., :count]
    return conv * post


def direct_sum(
    values: np.ndarray, u: np.ndarray, y: np.ndarray, sign: int = 1
) -> np.ndarray:
    """Reference O(n*m) evaluation used for cross-checks"""
    s = 1.0 if sign >= 0 else -1.0
    return np.exp(1j * s * np.outer(y, u)) @ np.asarray(values, dtype=complex)
