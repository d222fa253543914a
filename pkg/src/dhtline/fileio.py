"""File formats: line annotations, raw float32 tensors, and binary PGM images.

All readers reject malformed input rather than repairing it; errors carry
line numbers or byte offsets.

Annotation format: first non-comment line is ``W H``; each following
non-empty line is ``x1 y1 x2 y2`` in decimal pixel coordinates; ``#``
starts a comment.

Tensor format: 8-byte magic ``DHTTENS1``, u32 little-endian rank, rank u32
dims, then row-major IEEE-754 float32 payload.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .geometry import ImageDims, LineSegment, NoIntersectionError, clip_segment

__all__ = [
    "FormatError",
    "read_annotations",
    "write_annotations",
    "read_tensor",
    "write_tensor",
    "read_image_pgm",
    "write_image_pgm",
    "TENSOR_MAGIC",
]

TENSOR_MAGIC = b"DHTTENS1"


class FormatError(ValueError):
    """Malformed or inconsistent file content."""


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def read_annotations(path: str | Path) -> tuple[ImageDims, list[LineSegment]]:
    """Parse an annotation file into image dims and clipped segments.

    Each coordinate row is clipped to the image rectangle; rows entirely
    outside the image are rejected with their line number.
    """
    text = Path(path).read_text()
    dims: ImageDims | None = None
    segments: list[LineSegment] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        fields = line.split()
        if dims is None:
            if len(fields) != 2:
                raise FormatError(f"line {lineno}: expected 'W H' header, got {raw!r}")
            try:
                w, h = int(fields[0]), int(fields[1])
                dims = ImageDims(width=w, height=h)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: bad header: {exc}") from exc
            continue
        if len(fields) != 4:
            raise FormatError(
                f"line {lineno}: expected 'x1 y1 x2 y2', got {raw!r}"
            )
        try:
            x1, y1, x2, y2 = (float(v) for v in fields)
        except ValueError as exc:
            raise FormatError(f"line {lineno}: bad coordinate: {exc}") from exc
        if not all(np.isfinite([x1, y1, x2, y2])):
            raise FormatError(f"line {lineno}: non-finite coordinate")
        try:
            seg = clip_segment(LineSegment((x1, y1), (x2, y2)), dims)
        except NoIntersectionError as exc:
            raise FormatError(
                f"line {lineno}: segment lies outside the {dims.width}x"
                f"{dims.height} image"
            ) from exc
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        segments.append(seg)
    if dims is None:
        raise FormatError("missing 'W H' header line")
    return dims, segments


def write_annotations(
    dims: ImageDims, lines: list[LineSegment], path: str | Path
) -> None:
    """Write annotations in the format read_annotations parses.

    Coordinates carry 6 decimals, so a round trip is exact to 5e-7.
    """
    rows = [f"{dims.width} {dims.height}"]
    for seg in lines:
        rows.append(
            f"{seg.p0[0]:.6f} {seg.p0[1]:.6f} {seg.p1[0]:.6f} {seg.p1[1]:.6f}"
        )
    Path(path).write_text("\n".join(rows) + "\n")


def write_tensor(data: np.ndarray, path: str | Path) -> None:
    """Write a dense tensor as float32 in the DHTTENS1 container."""
    data = np.ascontiguousarray(data, dtype=np.float32)
    if not np.all(np.isfinite(data)):
        raise FormatError("refusing to write non-finite tensor values")
    header = TENSOR_MAGIC + struct.pack("<I", data.ndim)
    header += struct.pack(f"<{data.ndim}I", *data.shape)
    Path(path).write_bytes(header + data.tobytes())


def read_tensor(path: str | Path) -> np.ndarray:
    """Read a DHTTENS1 tensor; returns a float64 array of the stored shape."""
    blob = Path(path).read_bytes()
    if blob[:8] != TENSOR_MAGIC:
        raise FormatError(
            f"bad magic {blob[:8]!r}; expected {TENSOR_MAGIC!r}"
        )
    if len(blob) < 12:
        raise FormatError("truncated header: missing rank at byte 8")
    (rank,) = struct.unpack_from("<I", blob, 8)
    dims_end = 12 + 4 * rank
    if len(blob) < dims_end:
        raise FormatError(f"truncated header: expected {rank} dims at byte 12")
    shape = struct.unpack_from(f"<{rank}I", blob, 12)
    expected = int(np.prod(shape)) * 4
    payload = blob[dims_end:]
    if len(payload) != expected:
        raise FormatError(
            f"payload length {len(payload)} at byte {dims_end} does not match "
            f"shape {shape} ({expected} bytes)"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(shape)
    if not np.all(np.isfinite(data)):
        raise FormatError("tensor payload contains non-finite values")
    return data.astype(np.float64)


def read_image_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM (P5, maxval <= 255) as an (H, W) array in [0, 1]."""
    blob = Path(path).read_bytes()
    if blob[:2] != b"P5":
        raise FormatError(f"not a binary PGM: magic {blob[:2]!r}")
    pos = 2
    fields: list[int] = []
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        if pos < len(blob) and blob[pos : pos + 1] == b"#":
            while pos < len(blob) and blob[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        token = blob[start:pos]
        if not token.isdigit():
            raise FormatError(f"bad PGM header token {token!r} at byte {start}")
        fields.append(int(token))
    pos += 1  # single whitespace after maxval
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"bad PGM size {width}x{height}")
    if not (1 <= maxval <= 255):
        raise FormatError(f"unsupported PGM maxval {maxval}")
    payload = blob[pos : pos + width * height]
    if len(payload) != width * height:
        raise FormatError(
            f"truncated PGM payload: {len(payload)} of {width * height} bytes"
        )
    img = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return img.astype(np.float64) / maxval


def write_image_pgm(img: np.ndarray, path: str | Path) -> None:
    """Write an (H, W) array in [0, 1] as a binary PGM with maxval 255."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise FormatError(f"expected an (H, W) image, got shape {img.shape}")
    if img.min() < 0.0 or img.max() > 1.0:
        raise FormatError("image values must lie in [0, 1]")
    raw = np.round(img * 255.0).astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    Path(path).write_bytes(header + raw.tobytes())
