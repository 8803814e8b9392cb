"""Binary rasters of point sets and PPM output."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import PointSet


@dataclass(frozen=True, eq=False)
class Raster:
    """Occupancy grid; ``bits[row, col]`` with row 0 at the bottom (y axis up)."""

    bits: np.ndarray  # bool, shape (height, width)
    D: float
    axes: tuple[int, int | None]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def __getitem__(self, xy: tuple[int, int]) -> bool:
        x, y = xy
        return bool(self.bits[y, x])


def _pixel(coord: np.ndarray, D: float, size: int) -> np.ndarray:
    return np.clip(np.floor(coord / D * size), 0, size - 1).astype(np.int64)


def rasterize(points: PointSet, width: int = 800, height: int = 800,
              axes: tuple[int, int | None] | None = None) -> Raster:
    """Set pixel (floor(x_i / D * width), floor(x_j / D * height)) for every point.

    ``axes`` selects the projected coordinates; M = 1 gives a strip where every
    point lands in row 0.
    """
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be >= 1")
    M = points.M
    if axes is None:
        axes = (0, None) if M == 1 else (0, 1)
    i, j = axes
    for a in (i, j):
        if a is not None and not 0 <= a < M:
            raise ValueError(f"axis {a} out of range for points in R^{M}")
    bits = np.zeros((height, width), dtype=bool)
    cols = _pixel(points.points[:, i], points.D, width)
    rows = np.zeros_like(cols) if j is None else _pixel(points.points[:, j], points.D, height)
    bits[rows, cols] = True
    return Raster(bits, points.D, (i, j))


def ppm_bytes(raster: Raster) -> bytes:
    """Binary P6: set pixels black, clear pixels white, top row first."""
    header = f"P6\n{raster.width} {raster.height}\n255\n".encode("ascii")
    gray = np.where(raster.bits[::-1], 0, 255).astype(np.uint8)
    return header + np.repeat(gray[:, :, None], 3, axis=2).tobytes()


def write_ppm(raster: Raster, path) -> None:
    path = Path(path)
    try:
        path.write_bytes(ppm_bytes(raster))
    except OSError as exc:
        raise OSError(f"cannot write image to {path}: {exc.strerror or exc}") from exc


def read_ppm(data: bytes) -> np.ndarray:
    """Occupancy grid (row 0 at the bottom) from P6 bytes written by ``ppm_bytes``."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError("not an 8-bit binary PPM")
    w, h = (int(x) for x in parts[1].split())
    rgb = np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
    return (rgb[::-1, :, 0] == 0)


def write_png(raster: Raster, path) -> None:
    """PNG convenience output; needs Pillow."""
    try:
        from PIL import Image
    except ImportError:
        raise ImportError("PNG output requires Pillow: pip install Pillow") from None
    gray = np.where(raster.bits[::-1], 0, 255).astype(np.uint8)
    Image.fromarray(gray).save(Path(path))
