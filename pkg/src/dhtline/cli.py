"""Command-line frontend: transform, detect, score, eval, and bench pipelines."""

from __future__ import annotations

import argparse
import math
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import detect as detect_mod
from . import evaluate, fileio, hough, refine
from .geometry import (
    DEFAULT_DR,
    DEFAULT_DTHETA,
    ImageDims,
    NoIntersectionError,
    grid_from_intervals,
    segment_from_params,
)
from .metrics import MetricKind

__all__ = ["main", "RunConfig"]


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""

    dtheta: float = DEFAULT_DTHETA
    dr: float = DEFAULT_DR
    threshold: float = detect_mod.DEFAULT_DETECT_THRESHOLD
    delta_r: int = refine.DEFAULT_DELTA_R
    metric: MetricKind = MetricKind.EA
    threads: int | None = None
    match_mode: str = "per-threshold"


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    for name in ("dtheta", "dr", "threshold", "delta_r", "threads", "match_mode"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if getattr(args, "metric", None) is not None:
        cfg.metric = MetricKind(args.metric)
    return cfg


def cmd_transform(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    x = fileio.read_tensor(args.input)
    if x.ndim != 3:
        raise fileio.FormatError(f"expected a C x H x W tensor, got rank {x.ndim}")
    c, h, w = x.shape
    grid = grid_from_intervals(ImageDims(width=w, height=h), cfg.dtheta, cfg.dr)
    start = time.perf_counter()
    y = hough.dht_forward(x, grid, n_threads=cfg.threads)
    elapsed = time.perf_counter() - start
    fileio.write_tensor(y, args.output)
    print(f"grid {c}x{grid.n_theta}x{grid.n_r} in {elapsed * 1000.0:.3f} ms")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    edge_map: np.ndarray | None = None
    if args.edge_map:
        edge_map = fileio.read_image_pgm(args.edge_map)

    if args.from_param:
        prob = fileio.read_tensor(args.input)
        if prob.ndim == 3 and prob.shape[0] == 1:
            prob = prob[0]
        if prob.ndim != 2:
            raise fileio.FormatError(
                f"expected a theta x r probability tensor, got shape {prob.shape}"
            )
        dims = ImageDims(width=args.width, height=args.height)
        grid = grid_from_intervals(dims, cfg.dtheta, cfg.dr)
        if prob.shape != (grid.n_theta, grid.n_r):
            raise fileio.FormatError(
                f"tensor {prob.shape} does not match the {grid.n_theta}x"
                f"{grid.n_r} grid implied by --width/--height and intervals"
            )
    elif args.classical:
        img = fileio.read_image_pgm(args.input)
        dims = ImageDims(width=img.shape[1], height=img.shape[0])
        grid = grid_from_intervals(dims, cfg.dtheta, cfg.dr)
        if edge_map is None:
            edge_map = refine.sobel_edge_map(img)
        votes = hough.classical_accumulate(
            edge_map[None], grid, args.vote_threshold, n_threads=cfg.threads
        )[0]
        peak = votes.max()
        prob = votes / peak if peak > 0 else votes
    else:
        raise ValueError("choose an input mode: --from-param or --classical")

    detections = detect_mod.detect_lines(prob, grid, cfg.threshold)
    segments = []
    for det in detections:
        try:
            seg = segment_from_params(det.line, grid.dims)
        except NoIntersectionError:
            continue
        segments.append(seg)

    if args.refine:
        if edge_map is None:
            raise ValueError("--refine needs --edge-map in --from-param mode")
        segments = [
            refine.refine_line(seg, edge_map, cfg.delta_r) for seg in segments
        ]
    fileio.write_annotations(grid.dims, segments, args.output)
    print(f"{len(segments)} lines -> {args.output}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    dims_a, lines_a = fileio.read_annotations(args.first)
    dims_b, lines_b = fileio.read_annotations(args.second)
    if dims_a != dims_b:
        raise ValueError(
            f"image dims differ: {dims_a.width}x{dims_a.height} vs "
            f"{dims_b.width}x{dims_b.height}"
        )
    sim = evaluate.similarity_matrix(lines_a, lines_b, dims_a, cfg.metric)
    for row in sim:
        print(",".join(f"{v:.6f}" for v in row))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    pred_dir, gt_dir = Path(args.preds), Path(args.gts)
    pairs = []
    skipped = []
    dims: ImageDims | None = None
    for gt_path in sorted(gt_dir.iterdir()):
        if not gt_path.is_file():
            continue
        pred_path = pred_dir / gt_path.name
        if not pred_path.is_file():
            skipped.append(gt_path.name)
            print(f"warning: no prediction for {gt_path.name}, skipped", file=sys.stderr)
            continue
        gt_dims, gts = fileio.read_annotations(gt_path)
        pred_dims, preds = fileio.read_annotations(pred_path)
        if gt_dims != pred_dims:
            skipped.append(gt_path.name)
            print(f"warning: dim mismatch for {gt_path.name}, skipped", file=sys.stderr)
            continue
        dims = gt_dims
        pairs.append((preds, gts))
    if skipped:
        print(f"skipped {len(skipped)} file(s): {', '.join(skipped)}", file=sys.stderr)
    if not pairs or dims is None:
        print("error: no evaluable prediction/ground-truth pairs", file=sys.stderr)
        return 1
    report = evaluate.sweep_corpus(pairs, dims, cfg.metric, cfg.match_mode)
    csv_text = report.to_csv()
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    print(
        f"avg precision {report.avg_precision:.6f} "
        f"recall {report.avg_recall:.6f} f {report.avg_f:.6f}"
    )
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    dims = ImageDims(width=args.width, height=args.height)
    grid = grid_from_intervals(dims, cfg.dtheta, cfg.dr)
    rng = np.random.default_rng(args.seed)
    x = rng.random((args.channels, args.height, args.width))
    thread_counts = [int(v) for v in args.thread_counts.split(",")]
    hough.dht_forward(x, grid, n_threads=1)  # warm the kernel and the plan

    print("threads,median_ms,speedup")
    base_ms = None
    for n in thread_counts:
        times = []
        for _ in range(max(args.iters, 10)):
            start = time.perf_counter()
            hough.dht_forward(x, grid, n_threads=n)
            times.append((time.perf_counter() - start) * 1000.0)
        med = statistics.median(times)
        if base_ms is None:
            base_ms = med
        print(f"{n},{med:.3f},{base_ms / med:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhtline", description="Hough-space straight-line detection toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--dtheta", type=float, help="theta bin width in radians")
        p.add_argument("--dr", type=float, help="r bin width in pixels")
        p.add_argument("--threads", type=int, help="worker threads for kernels")

    p = sub.add_parser("transform", help="feature map -> parametric map")
    p.add_argument("input", help="C x H x W tensor file")
    p.add_argument("output", help="output C x theta x r tensor file")
    add_grid_flags(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("detect", help="detect lines from a map or image")
    p.add_argument("input", help="probability tensor or PGM image")
    p.add_argument("output", help="output annotation file")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument(
        "--from-param", action="store_true", help="input is a theta x r tensor"
    )
    mode.add_argument(
        "--classical", action="store_true", help="input is a PGM image (Sobel + voting)"
    )
    p.add_argument("--width", type=int, help="image width for --from-param")
    p.add_argument("--height", type=int, help="image height for --from-param")
    p.add_argument("--threshold", type=float, help="detection threshold in (0, 1)")
    p.add_argument(
        "--vote-threshold",
        type=float,
        default=0.5,
        help="edge binarization threshold for classical voting",
    )
    p.add_argument("--refine", action="store_true", help="edge-guided refinement")
    p.add_argument("--delta-r", type=int, dest="delta_r", help="refinement search radius")
    p.add_argument("--edge-map", help="precomputed edge map (PGM)")
    add_grid_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("score", help="pairwise similarity matrix of two files")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--metric", choices=[k.value for k in MetricKind])
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="P/R/F threshold sweep over two directories")
    p.add_argument("preds", help="directory of prediction annotation files")
    p.add_argument("gts", help="directory of ground-truth annotation files")
    p.add_argument("--metric", choices=[k.value for k in MetricKind])
    p.add_argument(
        "--match-mode",
        dest="match_mode",
        choices=["per-threshold", "match-once"],
    )
    p.add_argument("--out", help="write the CSV report here instead of stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="time the aggregation kernel")
    p.add_argument("--channels", type=int, default=64)
    p.add_argument("--width", type=int, default=100)
    p.add_argument("--height", type=int, default=100)
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--thread-counts",
        default="1,4",
        help="comma-separated worker counts to time",
    )
    add_grid_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
