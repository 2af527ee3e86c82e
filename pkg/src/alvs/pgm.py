"""Binary portable graymap (P5) reading and writing."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from alvs.frontend import Frame
from alvs.params import FRAME_HEIGHT, FRAME_WIDTH


def _tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    out, i = [], 0
    while len(out) < count:
        while i < len(buf) and buf[i : i + 1].isspace():
            i += 1
        if buf[i : i + 1] == b"#":
            while i < len(buf) and buf[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(buf) and not buf[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ValueError("truncated PGM header")
        out.append(buf[i:j])
        i = j
    return out, i + 1  # exactly one whitespace byte precedes the raster


def read_pgm_array(path) -> np.ndarray:
    buf = Path(path).read_bytes()
    (magic, w, h, maxval), start = _tokens(buf, 4)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    w, h, maxval = int(w), int(h), int(maxval)
    if maxval != 255:
        raise ValueError(f"{path}: maxval must be 255, got {maxval}")
    raster = buf[start : start + w * h]
    if len(raster) != w * h:
        raise ValueError(f"{path}: raster truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def read_frame(path, index: int = 0) -> Frame:
    arr = read_pgm_array(path)
    if arr.shape != (FRAME_HEIGHT, FRAME_WIDTH):
        raise ValueError(f"{path}: frames must be {FRAME_WIDTH} wide x {FRAME_HEIGHT} high, got {arr.shape[1]}x{arr.shape[0]}")
    return Frame(arr, index)


def write_pgm(path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.dtype != np.uint8:
        raise TypeError("write_pgm expects uint8 data")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image).tobytes())


def dump_map(path, m: np.ndarray) -> tuple[float, float]:
    """Write a real map as PGM after an affine rescale to [0, 255].

    The rescale is recorded next to the image in ``<path>.txt`` so the raw
    values can be recovered as ``raw = pixel / scale + lo``.
    """
    m = np.asarray(m, dtype=np.float64)
    lo, hi = float(m.min()), float(m.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    img = np.rint((m - lo) * scale).astype(np.uint8) if scale else np.zeros(m.shape, np.uint8)
    write_pgm(path, img)
    Path(str(path) + ".txt").write_text(f"min={lo!r}\nmax={hi!r}\nscale={scale!r}\noffset={lo!r}\n")
    return lo, scale
