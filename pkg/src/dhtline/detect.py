"""Ground-truth parametric maps, cross-entropy loss, and reverse-mapping detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import (
    ParametricLine,
    QuantizationGrid,
    fold_parametric,
    quantize,
)

__all__ = ["Detection", "gaussian_kernel", "ground_truth_map", "bce_loss", "detect_lines"]

KERNEL_SIZE = 5
KERNEL_SIGMA = 1.0
DEFAULT_DETECT_THRESHOLD = 0.01

_CLAMP_EPS = 1e-7


@dataclass(frozen=True)
class Detection:
    """One detected line with its peak probability and component size."""

    line: ParametricLine
    score: float
    component_size: int


def gaussian_kernel(size: int = KERNEL_SIZE, sigma: float = KERNEL_SIGMA) -> np.ndarray:
    """Square Gaussian kernel scaled so its central value equals 1."""
    half = size // 2
    ax = np.arange(-half, half + 1, dtype=np.float64)
    d2 = ax[:, None] ** 2 + ax[None, :] ** 2
    return np.exp(-d2 / (2.0 * sigma * sigma))


def ground_truth_map(
    lines: list[ParametricLine], grid: QuantizationGrid
) -> np.ndarray:
    """Target probability map: a peak-normalized Gaussian blob per line.

    Each line marks its quantized cell with 1 and spreads a 5x5 Gaussian
    around it (clipped at the map borders). Overlapping blobs combine by
    elementwise maximum, so every marked cell keeps value exactly 1 and the
    map stays in [0, 1].
    """
    out = np.zeros((grid.n_theta, grid.n_r), dtype=np.float64)
    kernel = gaussian_kernel()
    half = kernel.shape[0] // 2
    for pl in lines:
        b = quantize(pl, grid)
        t_lo, t_hi = max(b.t - half, 0), min(b.t + half + 1, grid.n_theta)
        s_lo, s_hi = max(b.s - half, 0), min(b.s + half + 1, grid.n_r)
        patch = kernel[
            t_lo - b.t + half : t_hi - b.t + half,
            s_lo - b.s + half : s_hi - b.s + half,
        ]
        np.maximum(out[t_lo:t_hi, s_lo:s_hi], patch, out=out[t_lo:t_hi, s_lo:s_hi])
    return out


def bce_loss(pred: np.ndarray, target: np.ndarray) -> float:
    """Binary cross-entropy between two probability maps, summed over cells.

    Predictions are clamped to [eps, 1-eps] before the logs.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    p = np.clip(pred, _CLAMP_EPS, 1.0 - _CLAMP_EPS)
    return float(-np.sum(target * np.log(p) + (1.0 - target) * np.log(1.0 - p)))


def detect_lines(
    prob: np.ndarray,
    grid: QuantizationGrid,
    threshold: float = DEFAULT_DETECT_THRESHOLD,
) -> list[Detection]:
    """Threshold a probability map and read one line per connected component.

    Components are 8-connected; each yields the probability-weighted centroid
    in continuous bin coordinates, converted to (theta, r) at bin-center
    offsets. Results are sorted by score descending, ties by centroid.
    """
    prob = np.asarray(prob, dtype=np.float64)
    if prob.shape != (grid.n_theta, grid.n_r):
        raise ValueError(
            f"probability map {prob.shape} does not match grid "
            f"({grid.n_theta}, {grid.n_r})"
        )
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    mask = prob >= threshold
    labels, n_comp = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    half_d = grid.dims.diagonal / 2.0

    results: list[tuple[float, float, float, Detection]] = []
    for comp in range(1, n_comp + 1):
        ts, ss = np.nonzero(labels == comp)
        w = prob[ts, ss]
        total = w.sum()
        t_bar = float((ts * w).sum() / total)
        s_bar = float((ss * w).sum() / total)
        line = fold_parametric(
            (t_bar + 0.5) * grid.dtheta, (s_bar + 0.5) * grid.dr - half_d
        )
        det = Detection(line=line, score=float(w.max()), component_size=len(ts))
        results.append((-det.score, t_bar, s_bar, det))
    results.sort(key=lambda item: item[:3])
    return [item[3] for item in results]
