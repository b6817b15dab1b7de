"""Hash database: Setup, Prepare and Detect, plus the on-disk formats.

A database keeps, for every reference image, the inverse digests of its B
blocks under one shared key. Queries are hashed block by block and scanned
linearly; an entry matches when enough of its blocks evaluate to 1 (all of
them by default).

DB file layout (little-endian)::

    "L1PH" u16 version
    p u64 | n u64 | q u32 | t u64 | t_plus u64 | t_minus u64 | delta u32
    B u64 | n_B u64 | pad_len u64 | seed u64 | a_present u8
    [a: n_B field elements]             if a_present
    count u64
    per entry: u16 id length, UTF-8 id, B * (t+1) field elements
    u32 CRC32 of everything above

``n`` is the image length, ``t`` and the split are per block. Field elements
use the width from ``pph.element_width``. A key file is a DB file with no
entries.
"""

from __future__ import annotations

import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from .imaging import BlockPlan, Image, plan_blocks
from .metrics import DimensionMismatchError, PredicateParams
from .pph import (
    Digest,
    InverseDigest,
    HashKey,
    KeyMismatch,
    element_width,
    pack_elements,
    samp,
    unpack_elements,
)

MAGIC = b"L1PH"
DIGEST_MAGIC = b"L1DG"
VERSION = 1
NO_SEED = (1 << 64) - 1

_HEADER = struct.Struct("<QQIQQQIQQQQB")
_DIGEST_HEADER = struct.Struct("<4sHHII")


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class HashDatabase:
    key: HashKey
    plan: BlockPlan
    entries: tuple[tuple[str, tuple[InverseDigest, ...]], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple((i, tuple(d)) for i, d in self.entries))
        if self.key.n != self.plan.n_B or self.key.t != self.plan.t_B:
            raise KeyMismatch("key does not fit the block plan")
        for image_id, digests in self.entries:
            if len(digests) != self.plan.B:
                raise ValueError(f"entry {image_id!r} has {len(digests)} blocks, expected {self.plan.B}")
            for d in digests:
                self.key._check_len(d)

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return [i for i, _ in self.entries]


@dataclass(frozen=True)
class DetectReport:
    matched: int
    matched_id: str | None
    per_block_bits: tuple[int, ...]
    scanned: int
    all_matches: tuple[str, ...] = field(default=())


def make_key(seed: int, plan: BlockPlan, q: int = 256, delta: int = 3, params: PredicateParams | None = None) -> HashKey:
    """One key shared by every block: n_B points and the per-block split of t_B."""
    if params is None:
        params = plan.params(delta)
    elif params.t != plan.t_B:
        raise KeyMismatch(f"params.t={params.t} differs from t_B={plan.t_B}")
    return samp(seed, plan.n_B, q, params)


def _as_vector(img) -> np.ndarray:
    if isinstance(img, Image):
        return img.vector()
    return np.asarray(img, dtype=np.int64).ravel()


def _blocks(plan: BlockPlan, img) -> list[np.ndarray]:
    x = _as_vector(img)
    if x.size != plan.n:
        raise DimensionMismatchError(f"image has {x.size} values, plan expects {plan.n}")
    return plan.split(x)


def prepare(key: HashKey, plan: BlockPlan, img) -> list[Digest]:
    """Per-block digests of a query image."""
    return [key.hash(b) for b in _blocks(plan, img)]


def setup(key: HashKey, plan: BlockPlan, images, on_error: str = "abort", skipped: list | None = None) -> HashDatabase:
    """Hash and invert every block of every (id, image) pair.

    With ``on_error="skip"`` images of the wrong size are left out and
    recorded in ``skipped`` as (id, message).
    """
    if on_error not in ("abort", "skip"):
        raise ValueError("on_error must be 'abort' or 'skip'")
    entries = []
    for image_id, img in images:
        try:
            digests = prepare(key, plan, img)
        except DimensionMismatchError as exc:
            if on_error == "abort":
                raise
            if skipped is not None:
                skipped.append((image_id, str(exc)))
            continue
        entries.append((image_id, tuple(key.invert(d) for d in digests)))
    return HashDatabase(key, plan, tuple(entries))


def _entry_bits(key: HashKey, inv: tuple[InverseDigest, ...], query: list[Digest], need: int) -> tuple[int, ...]:
    bits = []
    misses = 0
    for d_inv, d in zip(inv, query):
        b = key.eval(d_inv, d).matched
        bits.append(b)
        misses += 1 - b
        if misses > len(query) - need:
            break
    return tuple(bits)


def detect(db: HashDatabase, query, min_blocks: float = 1.0, all_matches: bool = False, jobs: int = 1) -> DetectReport:
    """Scan entries in order; stop at the first match unless ``all_matches``.

    An entry matches when at least ceil(min_blocks * B) blocks evaluate to 1.
    With several workers the result is the same as a sequential scan.
    """
    query = list(query)
    B = db.plan.B
    if len(query) != B:
        raise KeyMismatch(f"query has {len(query)} blocks, database expects {B}")
    for d in query:
        if not isinstance(d, Digest):
            raise TypeError("query must hold Digest objects")
        db.key._check_len(d)
    if not 0 < min_blocks <= 1:
        raise ValueError("min_blocks must lie in (0, 1]")
    need = max(1, ceil(min_blocks * B - 1e-12))

    def run(entry):
        return _entry_bits(db.key, entry[1], query, need)

    first = None
    hits = []
    scanned = 0
    if jobs > 1 and len(db.entries) > 1:
        pool = ThreadPoolExecutor(max_workers=jobs)
        results = pool.map(run, db.entries)
    else:
        pool = None
        results = map(run, db.entries)
    try:
        for (image_id, _), bits in zip(db.entries, results):
            scanned += 1
            if sum(bits) >= need:
                hits.append(image_id)
                if first is None:
                    first = (image_id, bits)
                if not all_matches:
                    break
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    if first is None:
        return DetectReport(0, None, (), scanned, ())
    return DetectReport(1, first[0], first[1], scanned, tuple(hits))


def _header(db: HashDatabase, include_a: bool) -> bytes:
    k, plan, prm = db.key, db.plan, db.key.params
    seed = NO_SEED if k.seed is None else int(k.seed)
    body = MAGIC + struct.pack("<H", VERSION)
    body += _HEADER.pack(
        k.p, plan.n, k.q, prm.t, prm.t_plus, prm.t_minus, prm.delta,
        plan.B, plan.n_B, plan.pad_len, seed, int(include_a),
    )
    if include_a:
        body += pack_elements(k.a, k.p)
    return body


def save(db: HashDatabase, include_a: bool = True) -> bytes:
    parts = [_header(db, include_a), struct.pack("<Q", len(db.entries))]
    for image_id, digests in db.entries:
        raw = image_id.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"id too long: {image_id[:32]!r}...")
        parts.append(struct.pack("<H", len(raw)) + raw)
        parts.extend(d.to_bytes() for d in digests)
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def save_key(key: HashKey, plan: BlockPlan) -> bytes:
    return save(HashDatabase(key, plan))


def _read(buf: bytes, pos: int, size: int) -> bytes:
    if pos + size > len(buf):
        raise FormatError("file truncated")
    return buf[pos : pos + size]


def load(buf: bytes, a=None) -> HashDatabase:
    """Parse a DB (or key) file. ``a`` supplies the points when the file omits them."""
    if len(buf) < 10:
        raise FormatError("file too short")
    if buf[:4] != MAGIC:
        raise FormatError(f"bad magic {buf[:4]!r}")
    (version,) = struct.unpack_from("<H", buf, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    body, (crc,) = buf[:-4], struct.unpack("<I", buf[-4:])
    if zlib.crc32(body) != crc:
        raise FormatError("CRC mismatch; file is corrupt")
    pos = 6
    (p, n, q, t, t_plus, t_minus, delta, B, n_B, pad_len, seed, a_present) = _HEADER.unpack(
        _read(body, pos, _HEADER.size)
    )
    pos += _HEADER.size
    w = element_width(p)
    if a_present:
        stored = unpack_elements(_read(body, pos, n_B * w), n_B, p)
        pos += n_B * w
        if a is not None and [int(v) for v in a] != [int(v) for v in stored]:
            raise KeyMismatch("supplied points differ from those stored in the file")
        a = stored
    elif a is None:
        raise KeyMismatch("file holds no evaluation points; supply the key file")
    if len(a) != n_B:
        raise KeyMismatch(f"key has {len(a)} points, file expects {n_B}")
    try:
        params = PredicateParams(t, t_plus, t_minus, delta)
        plan = plan_blocks(n, B, t * B)
    except ValueError as exc:
        raise FormatError(f"inconsistent header: {exc}") from exc
    if (plan.n_B, plan.pad_len) != (n_B, pad_len):
        raise FormatError("block layout in header is inconsistent")
    key = HashKey(p, tuple(int(v) for v in a), q, params, None if seed == NO_SEED else seed)
    (count,) = struct.unpack("<Q", _read(body, pos, 8))
    pos += 8
    block_bytes = (t + 1) * w
    entries = []
    for _ in range(count):
        (idlen,) = struct.unpack("<H", _read(body, pos, 2))
        pos += 2
        image_id = _read(body, pos, idlen).decode("utf-8")
        pos += idlen
        digests = []
        for _ in range(B):
            digests.append(InverseDigest(unpack_elements(_read(body, pos, block_bytes), t + 1, p), p))
            pos += block_bytes
        entries.append((image_id, tuple(digests)))
    if pos != len(body):
        raise FormatError(f"{len(body) - pos} trailing bytes")
    return HashDatabase(key, plan, tuple(entries))


def save_digests(digests, p: int) -> bytes:
    """Query digest file: 16-byte header then B blocks of t_B+1 elements."""
    digests = list(digests)
    if not digests:
        raise ValueError("no digests to write")
    t = digests[0].t
    if any(d.t != t or d.p != p for d in digests):
        raise KeyMismatch("digests disagree on length or field")
    head = _DIGEST_HEADER.pack(DIGEST_MAGIC, VERSION, element_width(p), len(digests), t)
    return head + b"".join(d.to_bytes() for d in digests)


def load_digests(buf: bytes, p: int) -> list[Digest]:
    if len(buf) < _DIGEST_HEADER.size:
        raise FormatError("digest file too short")
    magic, version, width, B, t = _DIGEST_HEADER.unpack_from(buf)
    if magic != DIGEST_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if width != element_width(p):
        raise KeyMismatch(f"element width {width} does not fit p={p}")
    size = (t + 1) * width
    if len(buf) != _DIGEST_HEADER.size + B * size:
        raise FormatError("digest file length does not match its header")
    return [
        Digest(unpack_elements(buf, t + 1, p, _DIGEST_HEADER.size + i * size), p) for i in range(B)
    ]
