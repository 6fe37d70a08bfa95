"""Noise-level estimation and wavelet-coefficient shrinkage.

The noise standard deviation of a detail subband is estimated as
``median(|coeffs|) / 0.6745`` (the Gaussian-consistent median absolute
deviation), and the shrinkage threshold is the universal threshold
``sigma * sqrt(2 ln N)``. Hard shrinkage zeroes coefficients with
``|x| <= lambda``; soft shrinkage additionally pulls survivors toward
zero by ``lambda`` while preserving sign.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAD_SCALE",
    "ThresholdEstimate",
    "mad_sigma",
    "universal_threshold",
    "hard_threshold",
    "soft_threshold",
]

# Rescales the median absolute deviation into a standard-deviation
# estimate for Gaussian noise.
MAD_SCALE = 0.6745


@dataclass(frozen=True)
class ThresholdEstimate:
    """Noise estimate ``delta_mad``, threshold ``lam``, and sample count ``n``."""

    delta_mad: float
    lam: float
    n: int

    def __post_init__(self):
        if self.delta_mad < 0 or self.lam < 0 or self.n < 2:
            raise ValueError("invalid threshold estimate")
        expected = self.delta_mad * math.sqrt(2.0 * math.log(self.n))
        if abs(self.lam - expected) > 1e-12 * max(1.0, expected):
            raise ValueError(
                f"threshold {self.lam!r} inconsistent with delta_mad={self.delta_mad!r}, n={self.n}"
            )


def mad_sigma(coeffs) -> float:
    """Median absolute deviation of ``coeffs`` rescaled by 1/0.6745."""
    a = np.abs(np.asarray(coeffs, dtype=np.float64)).ravel()
    if a.size == 0:
        raise ValueError("mad_sigma requires a non-empty coefficient sequence")
    if not np.all(np.isfinite(a)):
        raise ValueError("mad_sigma requires finite coefficients")
    return float(np.median(a)) / MAD_SCALE


def universal_threshold(delta_mad: float, n: int) -> ThresholdEstimate:
    """Universal threshold ``delta_mad * sqrt(2 ln n)`` over ``n`` samples."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    delta_mad = float(delta_mad)
    if not np.isfinite(delta_mad) or delta_mad < 0:
        raise ValueError(f"delta_mad must be a non-negative finite real, got {delta_mad}")
    lam = delta_mad * math.sqrt(2.0 * math.log(n))
    return ThresholdEstimate(delta_mad=delta_mad, lam=lam, n=int(n))


def hard_threshold(sub, lam: float) -> np.ndarray:
    """Zero every coefficient with ``|x| <= lam``; keep the rest verbatim."""
    if lam < 0:
        raise ValueError(f"threshold must be non-negative, got {lam}")
    x = np.asarray(sub, dtype=np.float64)
    return np.where(np.abs(x) <= lam, 0.0, x)


def soft_threshold(sub, lam: float) -> np.ndarray:
    """Shrink magnitudes toward zero: ``sign(x) * max(|x| - lam, 0)``."""
    if lam < 0:
        raise ValueError(f"threshold must be non-negative, got {lam}")
    x = np.asarray(sub, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)
