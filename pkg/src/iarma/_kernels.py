"""Sequential recursions shared by the model, predictor, and likelihood code.

Every routine here walks the observation grid once, carrying the
innovation-variance factor c_n along.  The loops cannot be vectorized (each
step feeds the next), so they are JIT-compiled with numba when it is
importable; set ``IARMA_NO_NUMBA=1`` to force the pure-Python fallbacks.
Both paths execute the same floating-point operations in the same order, so
results are bit-identical either way.

Inputs are pre-computed power arrays ``pp = phi ** gaps`` and
``tp = theta ** gaps`` (length N-1) plus the starting factor c_1; callers own
parameter validation and the positivity check on the returned c sequence.
"""

from __future__ import annotations

import os

import numpy as np


def _cf_recursion_py(pp: np.ndarray, tp: np.ndarray, c1: float) -> np.ndarray:
    n = pp.shape[0] + 1
    c = np.empty(n)
    c[0] = c1
    for i in range(1, n):
        w = tp[i - 1] / c[i - 1]
        c[i] = c1 * (1.0 - pp[i - 1] * pp[i - 1]) - 2.0 * pp[i - 1] * tp[i - 1] - tp[i - 1] * w
    return c


def _innovations_py(x: np.ndarray, pp: np.ndarray, tp: np.ndarray, c1: float):
    n = x.shape[0]
    c = np.empty(n)
    xhat = np.empty(n)
    c[0] = c1
    xhat[0] = 0.0
    for i in range(1, n):
        w = tp[i - 1] / c[i - 1]
        e = x[i - 1] - xhat[i - 1]
        xhat[i] = pp[i - 1] * x[i - 1] + w * e
        c[i] = c1 * (1.0 - pp[i - 1] * pp[i - 1]) - 2.0 * pp[i - 1] * tp[i - 1] - tp[i - 1] * w
    return c, xhat


def _state_py(x: np.ndarray, pp: np.ndarray, tp: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    alpha = np.empty(n)
    alpha[0] = 0.0
    for i in range(1, n):
        w = tp[i - 1] / c[i - 1]
        alpha[i] = (pp[i - 1] + w) * x[i - 1] - w * alpha[i - 1]
    return alpha


def _simulate_py(eps: np.ndarray, pp: np.ndarray, tp: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = eps.shape[0]
    x = np.empty(n)
    x[0] = eps[0]
    for i in range(1, n):
        x[i] = pp[i - 1] * x[i - 1] + eps[i] + (tp[i - 1] / c[i - 1]) * eps[i - 1]
    return x


USING_NUMBA = False
if not os.environ.get("IARMA_NO_NUMBA"):
    try:
        from numba import njit

        cf_recursion = njit(cache=True)(_cf_recursion_py)
        innovations = njit(cache=True)(_innovations_py)
        state_recursion = njit(cache=True)(_state_py)
        simulate_recursion = njit(cache=True)(_simulate_py)
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via IARMA_NO_NUMBA
        pass

if not USING_NUMBA:
    cf_recursion = _cf_recursion_py
    innovations = _innovations_py
    state_recursion = _state_py
    simulate_recursion = _simulate_py
