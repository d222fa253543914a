"""Matching-based evaluation: Hungarian pairing, P/R/F, and the threshold sweep."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import ImageDims, LineSegment
from .metrics import MetricKind, similarity

__all__ = [
    "ThresholdRow",
    "MatchReport",
    "similarity_matrix",
    "max_matching",
    "match_once",
    "prf",
    "sweep",
    "sweep_corpus",
    "sweep_counts",
    "report_from_counts",
    "TAUS",
]

# The evaluation sweep runs tau = 0.01, 0.02, ..., 0.99.
TAUS = [round(k / 100.0, 2) for k in range(1, 100)]


@dataclass(frozen=True)
class ThresholdRow:
    tau: float
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f: float


@dataclass(frozen=True)
class MatchReport:
    """Per-threshold counts/scores plus unweighted averages over the sweep."""

    rows: list[ThresholdRow] = field(default_factory=list)
    avg_precision: float = 0.0
    avg_recall: float = 0.0
    avg_f: float = 0.0

    def to_csv(self) -> str:
        lines = ["tau,tp,fp,fn,precision,recall,f"]
        for row in self.rows:
            lines.append(
                f"{row.tau:.2f},{row.tp},{row.fp},{row.fn},"
                f"{row.precision:.6f},{row.recall:.6f},{row.f:.6f}"
            )
        lines.append(
            f"avg,,,,{self.avg_precision:.6f},{self.avg_recall:.6f},{self.avg_f:.6f}"
        )
        return "\n".join(lines) + "\n"


def similarity_matrix(
    preds: list[LineSegment],
    gts: list[LineSegment],
    dims: ImageDims,
    kind: MetricKind = MetricKind.EA,
) -> np.ndarray:
    """Dense n_pred x n_gt matrix of pairwise similarities."""
    out = np.zeros((len(preds), len(gts)), dtype=np.float64)
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            out[i, j] = similarity(p, g, dims, kind)
    return out


def max_matching(sim: np.ndarray, tau: float) -> list[tuple[int, int]]:
    """Maximum-cardinality matching over edges with similarity >= tau.

    Among maximum-cardinality matchings the total similarity is maximized
    (assignment with a large per-edge bonus so cardinality dominates).
    Returned pairs are sorted by (pred_index, gt_index).
    """
    sim = np.asarray(sim, dtype=np.float64)
    if sim.size == 0:
        return []
    allowed = sim >= tau
    if not allowed.any():
        return []
    bonus = float(sim.size) + 1.0
    gain = np.where(allowed, sim + bonus, 0.0)
    ri, ci = linear_sum_assignment(gain, maximize=True)
    pairs = [(int(i), int(j)) for i, j in zip(ri, ci) if allowed[i, j]]
    pairs.sort()
    return pairs


def match_once(sim: np.ndarray) -> list[tuple[int, int]]:
    """Single maximum-weight matching over all positive-similarity edges."""
    return max_matching(sim, tau=np.finfo(np.float64).tiny)


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall, F-measure with the zero-count conventions:
    P = 0 when TP+FP = 0, R = 0 when TP+FN = 0, F = 0 when P+R = 0."""
    if tp < 0 or fp < 0 or fn < 0:
        raise ValueError("counts must be non-negative")
    p = tp / (tp + fp) if tp + fp > 0 else 0.0
    r = tp / (tp + fn) if tp + fn > 0 else 0.0
    f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def sweep_counts(
    sim: np.ndarray, match_mode: str = "per-threshold"
) -> list[tuple[int, int, int]]:
    """Per-tau (TP, FP, FN) counts for one similarity matrix.

    ``per-threshold`` re-solves the matching on the tau-filtered graph for
    each tau; ``match-once`` solves a single maximum-weight matching and
    then thresholds the matched pairs.
    """
    sim = np.asarray(sim, dtype=np.float64)
    n_pred, n_gt = sim.shape
    counts = []
    if match_mode == "per-threshold":
        for tau in TAUS:
            tp = len(max_matching(sim, tau))
            counts.append((tp, n_pred - tp, n_gt - tp))
    elif match_mode == "match-once":
        matched = [sim[i, j] for i, j in match_once(sim)]
        for tau in TAUS:
            tp = sum(1 for s in matched if s >= tau)
            counts.append((tp, n_pred - tp, n_gt - tp))
    else:
        raise ValueError(f"unknown match mode: {match_mode!r}")
    return counts


def report_from_counts(counts: list[tuple[int, int, int]]) -> MatchReport:
    rows = []
    for tau, (tp, fp, fn) in zip(TAUS, counts):
        p, r, f = prf(tp, fp, fn)
        rows.append(ThresholdRow(tau, tp, fp, fn, p, r, f))
    return MatchReport(
        rows=rows,
        avg_precision=sum(r.precision for r in rows) / len(rows),
        avg_recall=sum(r.recall for r in rows) / len(rows),
        avg_f=sum(r.f for r in rows) / len(rows),
    )


def sweep(
    preds: list[LineSegment],
    gts: list[LineSegment],
    dims: ImageDims,
    kind: MetricKind = MetricKind.EA,
    match_mode: str = "per-threshold",
) -> MatchReport:
    """Threshold sweep for a single image's predictions and ground truths."""
    return sweep_corpus([(preds, gts)], dims, kind, match_mode)


def sweep_corpus(
    image_pairs: list[tuple[list[LineSegment], list[LineSegment]]],
    dims: ImageDims,
    kind: MetricKind = MetricKind.EA,
    match_mode: str = "per-threshold",
) -> MatchReport:
    """Threshold sweep over one or more (preds, gts) pairs.

    Counts are summed across images per threshold before computing P/R/F
    (micro-averaging); the reported averages are unweighted means over all
    99 thresholds.
    """
    totals = [(0, 0, 0)] * len(TAUS)
    for preds, gts in image_pairs:
        sim = similarity_matrix(preds, gts, dims, kind)
        counts = sweep_counts(sim, match_mode)
        totals = [
            (a + tp, b + fp, c + fn)
            for (a, b, c), (tp, fp, fn) in zip(totals, counts)
        ]
    return report_from_counts(totals)
