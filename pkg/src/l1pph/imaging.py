"""Image ingestion, flattening, block partitioning and enhancement transforms.

Only binary netpbm is read: P5 (grayscale) and P6 (RGB) with maxval 255.
Images flatten row-major with channels interleaved, so an RGB image of
h x w pixels becomes a vector of n = 3hw values in Z_256.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import floor

import numpy as np

from .metrics import PredicateParams

Q = 256


class ParseError(ValueError):
    pass


class BadBlockCount(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Image:
    width: int
    height: int
    channels: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        data = np.asarray(self.data, dtype=np.uint8).ravel()
        if data.size != self.width * self.height * self.channels:
            raise ValueError("data length does not match dimensions")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.size

    @property
    def q(self) -> int:
        return Q

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Image)
            and (self.width, self.height, self.channels) == (other.width, other.height, other.channels)
            and np.array_equal(self.data, other.data)
        )

    def array(self) -> np.ndarray:
        """(height, width) or (height, width, 3) view."""
        shape = (self.height, self.width) if self.channels == 1 else (self.height, self.width, 3)
        return self.data.reshape(shape)

    @classmethod
    def from_array(cls, arr) -> "Image":
        arr = np.asarray(arr)
        if arr.ndim == 2:
            return cls(arr.shape[1], arr.shape[0], 1, arr)
        if arr.ndim == 3 and arr.shape[2] == 3:
            return cls(arr.shape[1], arr.shape[0], 3, arr)
        raise ValueError(f"unsupported array shape {arr.shape}")

    def vector(self) -> np.ndarray:
        return self.data.astype(np.int64)


_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def load_image(buf: bytes) -> Image:
    """Parse a binary PGM (P5) or PPM (P6) file."""
    pos = 0
    tokens = []
    for _ in range(4):
        m = _TOKEN.match(buf, pos)
        if not m:
            raise ParseError("truncated header")
        tokens.append(m.group(1))
        pos = m.end()
    magic, w, h, maxval = tokens
    if magic not in (b"P5", b"P6"):
        raise ParseError(f"unsupported magic {magic!r}")
    try:
        width, height, maxv = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise ParseError("non-numeric header field") from exc
    if width < 1 or height < 1:
        raise ParseError("empty image")
    if maxv != 255:
        raise ParseError(f"maxval must be 255, got {maxv}")
    if pos >= len(buf) or not buf[pos : pos + 1].isspace():
        raise ParseError("missing whitespace after header")
    pos += 1
    channels = 1 if magic == b"P5" else 3
    size = width * height * channels
    payload = buf[pos : pos + size]
    if len(payload) < size:
        raise ParseError(f"payload truncated: {len(payload)} of {size} bytes")
    return Image(width, height, channels, np.frombuffer(payload, dtype=np.uint8))


def dump_image(img: Image) -> bytes:
    magic = b"P5" if img.channels == 1 else b"P6"
    return magic + f"\n{img.width} {img.height}\n255\n".encode() + img.data.tobytes()


def read_image(path) -> Image:
    with open(path, "rb") as fh:
        return load_image(fh.read())


def write_image(path, img: Image) -> None:
    with open(path, "wb") as fh:
        fh.write(dump_image(img))


def load_raw_vector(text: str) -> tuple[int, np.ndarray]:
    """Parse the raw vector format ``n q`` followed by n integers; returns (q, x)."""
    parts = text.split()
    if len(parts) < 2:
        raise ParseError("raw vector needs an 'n q' header")
    n, q = int(parts[0]), int(parts[1])
    vals = np.array([int(v) for v in parts[2:]], dtype=np.int64)
    if vals.size != n:
        raise ParseError(f"expected {n} values, got {vals.size}")
    if vals.size and (vals.min() < 0 or vals.max() >= q):
        raise ParseError(f"values must lie in [0, {q - 1}]")
    return q, vals


def dump_raw_vector(x, q: int) -> str:
    x = np.asarray(x).ravel()
    return f"{x.size} {q}\n" + " ".join(str(int(v)) for v in x) + "\n"


@dataclass(frozen=True)
class BlockPlan:
    """Contiguous partition of a flat vector of length n into B blocks.

    Blocks hold n_B = ceil(n / B) values; the last one is zero-padded by
    ``pad_len``. Each block carries threshold t_B = floor(t / B).
    """

    n: int
    B: int
    n_B: int
    pad_len: int
    t_B: int

    def params(self, delta: int = 3) -> PredicateParams:
        return PredicateParams.balanced(self.t_B, delta)

    def split(self, x) -> list[np.ndarray]:
        x = np.asarray(x, dtype=np.int64).ravel()
        if x.size != self.n:
            raise ValueError(f"expected {self.n} values, got {x.size}")
        padded = np.concatenate([x, np.zeros(self.pad_len, dtype=np.int64)])
        return [padded[i * self.n_B : (i + 1) * self.n_B] for i in range(self.B)]

    def join(self, blocks) -> np.ndarray:
        return np.concatenate(list(blocks))[: self.n]


def plan_blocks(n: int, B: int, t: int) -> BlockPlan:
    if B < 1 or B > n:
        raise BadBlockCount(f"block count {B} must lie in [1, {n}]")
    if t < B:
        raise BadBlockCount(f"t={t} leaves less than one unit of threshold per block")
    n_B = -(-n // B)
    if (B - 1) * n_B >= n:
        raise BadBlockCount(f"{B} blocks of {n_B} leave an empty final block")
    return BlockPlan(n, B, n_B, n_B * B - n, t // B)


def split_blocks(img, B: int, t: int) -> tuple[BlockPlan, list[np.ndarray]]:
    """Partition an Image (or flat vector) into B contiguous blocks."""
    x = img.vector() if isinstance(img, Image) else np.asarray(img, dtype=np.int64).ravel()
    plan = plan_blocks(x.size, B, t)
    return plan, plan.split(x)


def default_threshold(q: int, n: int) -> int:
    """ceil(0.01 q n), computed exactly."""
    return -(-q * n // 100)


def _round_half_up(v: np.ndarray) -> np.ndarray:
    return np.floor(v + 0.5)


def mean_luminance(img: Image) -> float:
    if img.channels == 1:
        return float(img.data.mean())
    rgb = img.array().reshape(-1, 3).astype(np.float64)
    return float((rgb @ np.array([0.299, 0.587, 0.114])).mean())


def adjust(img: Image, kind: str, epsilon: float) -> Image:
    """Brightness (scale by epsilon) or contrast (scale about the mean luminance)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 1:
        return img
    v = img.data.astype(np.float64)
    if kind == "brightness":
        out = epsilon * v
    elif kind == "contrast":
        mu = mean_luminance(img)
        out = mu + epsilon * (v - mu)
    else:
        raise ValueError(f"unknown adjustment {kind!r}")
    out = np.clip(_round_half_up(out), 0, 255).astype(np.uint8)
    return Image(img.width, img.height, img.channels, out)


def timing_block(n: int, B: int, q: int = Q, fraction: float = 0.01) -> tuple[int, int]:
    """(n_B, t_B) as tabulated for timing: floor(n/B) and floor(fraction q n_B)."""
    n_B = n // B
    return n_B, floor(Fraction(str(fraction)) * q * n_B)
