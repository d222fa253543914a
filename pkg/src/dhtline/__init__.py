"""Hough-space straight-line detection toolkit.

Feature aggregation along candidate lines, reverse mapping from the
parametric space back to image lines, edge-guided refinement, similarity
metrics, and a matching-based evaluation harness.
"""

from .detect import Detection, bce_loss, detect_lines, ground_truth_map
from .evaluate import (
    MatchReport,
    max_matching,
    prf,
    similarity_matrix,
    sweep,
    sweep_corpus,
)
from .geometry import (
    BinIndex,
    ImageDims,
    LineSegment,
    NoIntersectionError,
    ParametricLine,
    QuantizationGrid,
    bin_center,
    boundary_walk,
    grid_from_intervals,
    params_from_segment,
    quantize,
    segment_from_params,
)
from .hough import (
    classical_accumulate,
    concat_channels,
    dht_forward,
    rasterize_line,
    rasterize_segment,
    resample_parametric_map,
    rht_adjoint,
)
from .metrics import (
    MetricKind,
    angular_similarity,
    chamfer_similarity,
    ea_score,
    emd_similarity,
    euclidean_similarity,
)
from .refine import edge_density, refine_line, sobel_edge_map

__version__ = "0.1.0"
