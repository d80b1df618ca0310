"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array


def check_statistics(X, m: int | None = None, estimator=None) -> np.ndarray:
    """Validate a ``(trials, M)`` array of per-sensor statistics.

    NaN is allowed (censored sensors report nothing); infinities are not.
    """
    X = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan", estimator=estimator)
    if np.isinf(X).any():
        raise ValueError("statistics must not contain infinities")
    if m is not None and X.shape[1] != m:
        raise ValueError(f"X has {X.shape[1]} sensors, expected {m}")
    return X


def check_probability(p, name: str = "p_fa", closed: bool = False) -> float:
    p = float(p)
    ok = 0 < p <= 1 if closed else 0 < p < 1
    if not ok:
        interval = "(0, 1]" if closed else "(0, 1)"
        raise ValueError(f"{name} must lie in {interval}, got {p}")
    return p


def check_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y).ravel()
    if y.shape[0] != n:
        raise ValueError(f"y has {y.shape[0]} labels for {n} samples")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 (H0) or 1 (H1)")
    return y.astype(int)
