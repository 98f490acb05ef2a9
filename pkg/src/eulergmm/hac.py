"""Long-run covariance estimation with the Bartlett (Newey-West) kernel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class HACConfig:
    kernel: str = "bartlett"
    bandwidth: Union[int, str] = "auto"

    def __post_init__(self):
        if self.kernel.lower() != "bartlett":
            raise ValueError(f"unsupported kernel {self.kernel!r}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "auto":
                raise ValueError(f"bandwidth must be 'auto' or an integer, got {self.bandwidth!r}")
        elif self.bandwidth < 0:
            raise ValueError(f"bandwidth must be >= 0, got {self.bandwidth}")

    def resolve_bandwidth(self, T: int) -> int:
        """`auto` uses the standard rule floor(4 * (T/100)^(2/9))."""
        if self.bandwidth == "auto":
            return int(np.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))
        return int(self.bandwidth)


def hac_variance(W: np.ndarray, cfg: HACConfig = HACConfig()) -> np.ndarray:
    """Bartlett-kernel long-run covariance of the rows of W.

    W holds demeaned per-observation contributions. The estimate is
    Gamma_0 + sum_j w_j (Gamma_j + Gamma_j') with w_j = 1 - j/(B+1) and
    Gamma_j = (1/T) sum_t W_t W_{t-j}', which is positive semidefinite by
    construction of the kernel.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2:
        raise ValueError(f"W must be 2-D, got shape {W.shape}")
    T = W.shape[0]
    B = cfg.resolve_bandwidth(T)
    if B >= T:
        raise ValueError(f"bandwidth {B} must be < T={T}")
    V = W.T @ W / T
    for j in range(1, B + 1):
        w = 1.0 - j / (B + 1.0)
        G = W[j:].T @ W[:-j] / T
        V += w * (G + G.T)
    return 0.5 * (V + V.T)
