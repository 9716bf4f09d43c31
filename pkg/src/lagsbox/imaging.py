"""Row-wise polyalphabetic substitution of 8-bit grayscale images.

Each pixel row is pushed through its own S-box from a family, so one gray
level maps to different outputs on different rows.  This flattens the
histogram; it is a demonstration, not a cipher.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import FamilyTooSmallError, ImageFormatError
from .sbox import SBoxFamily


@dataclass(frozen=True, eq=False)
class GrayImage:
    """``height x width`` raster of uint8 intensities, stored row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError("pixels must be a 2-D array")
        if px.size and (px.min() < 0 or px.max() > 255):
            raise ValueError("pixel values must lie in [0, 255]")
        px = px.astype(np.uint8)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()


def _row_tables(image: GrayImage, family: SBoxFamily, inverse: bool) -> np.ndarray:
    if len(family) < image.height:
        raise FamilyTooSmallError(f"family has {len(family)} S-boxes but the image has {image.height} rows")
    members = family.members[: image.height]
    if any(m.n != 8 for m in members):
        raise ValueError("image substitution needs 8x8 S-boxes")
    tables = np.stack([m.table for m in members])
    if inverse:
        inv = np.empty_like(tables)
        rows = np.arange(tables.shape[0])[:, None]
        inv[rows, tables] = np.arange(256)[None, :]
        tables = inv
    return tables


def substitute(image: GrayImage, family: SBoxFamily) -> GrayImage:
    """Output pixel ``(r, c)`` is ``family[r][image[r, c]]``."""
    tables = _row_tables(image, family, inverse=False)
    return GrayImage(np.take_along_axis(tables, image.pixels.astype(np.int64), axis=1))


def unsubstitute(image: GrayImage, family: SBoxFamily) -> GrayImage:
    tables = _row_tables(image, family, inverse=True)
    return GrayImage(np.take_along_axis(tables, image.pixels.astype(np.int64), axis=1))


def histogram(image: GrayImage) -> np.ndarray:
    """256 bin counts."""
    return np.bincount(image.pixels.ravel(), minlength=256).astype(np.int64)


def chi_square_uniformity(bins: np.ndarray) -> float:
    """Pearson statistic of ``bins`` against a flat histogram with the same total."""
    bins = np.asarray(bins, dtype=float)
    expected = bins.sum() / bins.size
    return float(((bins - expected) ** 2).sum() / expected)


def write_histogram_csv(path, bins: np.ndarray) -> None:
    lines = ["value,count"] + [f"{v},{int(c)}" for v, c in enumerate(bins)]
    Path(path).write_text("\n".join(lines) + "\n")


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif data[pos:pos + 1].isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ImageFormatError("truncated PGM header")
    return data[start:pos], pos


def parse_pgm(data: bytes) -> GrayImage:
    """Decode binary PGM (``P5``, maxval 255)."""
    magic, pos = _read_token(data, 0)
    if magic != b"P5":
        raise ImageFormatError(f"not a binary PGM (magic {magic!r})")
    fields = []
    for _ in range(3):
        token, pos = _read_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise ImageFormatError(f"bad PGM header field {token!r}") from exc
    width, height, maxval = fields
    if maxval != 255:
        raise ImageFormatError(f"only maxval 255 is supported, got {maxval}")
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"bad PGM dimensions {width}x{height}")
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise ImageFormatError(f"PGM raster holds {len(raster)} bytes, expected {width * height}")
    return GrayImage(np.frombuffer(raster, dtype=np.uint8).reshape(height, width))


def format_pgm(image: GrayImage) -> bytes:
    return f"P5\n{image.width} {image.height}\n255\n".encode() + image.tobytes()


def read_pgm(path) -> GrayImage:
    return parse_pgm(Path(path).read_bytes())


def write_pgm(path, image: GrayImage) -> None:
    Path(path).write_bytes(format_pgm(image))


def bundled_image() -> GrayImage:
    """512 x 512 natural test photograph shipped with the package."""
    return parse_pgm(resources.files("lagsbox").joinpath("data", "camera.pgm").read_bytes())
