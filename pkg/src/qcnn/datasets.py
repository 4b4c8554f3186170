"""Simulated QC measurement tuples: contamination patterns, training and test sets.

Bulk data lives in :class:`TupleBatch` (parallel numpy arrays); iterate
``batch.records()`` for per-tuple :class:`TupleRecord` objects.  Generation is
chunked, and chunk ``i`` always draws from substream ``i`` of the caller's
stream, so content does not depend on how chunks are scheduled.
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .numerics import RngState, RngStream

MIX_RATIOS = (1, 2, 3, 4, 6, 8, 12, 16)
MAX_N = 4
CHUNK_SIZE = 1 << 16
DEFAULT_MAX_RECORDS = 50_000_000

DATASET_MAGIC = b"QCDS"
DATASET_VERSION = 1


class DatasetError(ValueError):
    """Invalid dataset parameters or malformed dataset file."""


def enumerate_patterns(n: int, k: int) -> list[tuple[int, ...]]:
    """All C(n, k) sets of out-of-control positions (1-based), lexicographic."""
    if not 1 <= n <= MAX_N:
        raise DatasetError(f"n must lie in 1..{MAX_N}, got {n}")
    if not 0 <= k <= n:
        raise DatasetError(f"k must lie in 0..n, got k={k}, n={n}")
    return list(itertools.combinations(range(1, n + 1), k))


def mask_bits(positions) -> int:
    return sum(1 << (p - 1) for p in positions)


def mask_positions(bits: int, n: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(n) if bits >> i & 1)


@dataclass(frozen=True)
class ContaminationPattern:
    n: int
    positions: tuple[int, ...] = ()
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(sorted(self.positions)))
        if not 1 <= self.n <= MAX_N:
            raise DatasetError(f"n must lie in 1..{MAX_N}, got {self.n}")
        if len(set(self.positions)) != len(self.positions) or any(
            not 1 <= p <= self.n for p in self.positions
        ):
            raise DatasetError(f"invalid positions {self.positions} for n={self.n}")
        if self.sigma < 0:
            raise DatasetError(f"sigma must be nonnegative, got {self.sigma}")
        if self.k == 0 and (self.mu != 0.0 or self.sigma != 1.0):
            raise DatasetError("an in-control pattern requires mu=0, sigma=1")
        if self.k > 0 and not (abs(self.mu) > 0 or self.sigma > 1):
            raise DatasetError("an out-of-control pattern needs |mu| > 0 or sigma > 1")

    @property
    def k(self) -> int:
        return len(self.positions)

    @property
    def bits(self) -> int:
        return mask_bits(self.positions)


def label_tuple(pattern: ContaminationPattern) -> bool:
    """Ground truth: out of control iff any measurement is contaminated."""
    return pattern.k >= 1


@dataclass(frozen=True)
class TupleRecord:
    values: tuple[float, ...]
    label: bool
    pattern: ContaminationPattern


@dataclass
class TupleBatch:
    """Column-wise storage of many tuples of the same size n.

    ``mask`` holds the contaminated positions as bits (bit i is position i + 1).
    """

    values: np.ndarray
    k: np.ndarray
    mask: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def label(self) -> np.ndarray:
        return self.k >= 1

    def __len__(self) -> int:
        return self.values.shape[0]

    def take(self, index) -> "TupleBatch":
        return TupleBatch(
            self.values[index], self.k[index], self.mask[index], self.mu[index], self.sigma[index]
        )

    @classmethod
    def concat(cls, batches) -> "TupleBatch":
        batches = list(batches)
        if not batches:
            raise DatasetError("nothing to concatenate")
        return cls(*(np.concatenate([getattr(b, f) for b in batches]) for f in
                     ("values", "k", "mask", "mu", "sigma")))

    def records(self) -> Iterator[TupleRecord]:
        n = self.n
        for i in range(len(self)):
            k = int(self.k[i])
            pattern = ContaminationPattern(
                n, mask_positions(int(self.mask[i]), n),
                float(self.mu[i]) if k else 0.0, float(self.sigma[i]) if k else 1.0,
            )
            yield TupleRecord(tuple(float(v) for v in self.values[i]), k >= 1, pattern)


def generate_block(n: int, positions, count: int, mu, sigma, rng: RngStream) -> TupleBatch:
    """``count`` tuples; coordinates in ``positions`` are ``mu + sigma * z``.

    ``mu`` and ``sigma`` may be scalars or per-tuple arrays.  Draw order is the
    row-major ``(count, n)`` block of standard normals.
    """
    values = rng.normal((count, n))
    positions = tuple(positions)
    mu_arr = np.broadcast_to(np.asarray(mu, dtype=np.float64), (count,)).copy()
    sigma_arr = np.broadcast_to(np.asarray(sigma, dtype=np.float64), (count,)).copy()
    if positions:
        cols = [p - 1 for p in positions]
        values[:, cols] = mu_arr[:, None] + sigma_arr[:, None] * values[:, cols]
    return TupleBatch(
        values,
        np.full(count, len(positions), dtype=np.int8),
        np.full(count, mask_bits(positions), dtype=np.uint8),
        mu_arr,
        sigma_arr,
    )


def generate_tuple(pattern: ContaminationPattern, rng: RngStream | RngState) -> TupleRecord:
    if isinstance(rng, RngState):
        rng = RngStream(rng)
    batch = generate_block(pattern.n, pattern.positions, 1, pattern.mu, pattern.sigma, rng)
    return TupleRecord(tuple(float(v) for v in batch.values[0]), label_tuple(pattern), pattern)


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (i < extra) for i in range(parts)]


def _chunks(count: int) -> list[int]:
    return _split(count, max(1, math.ceil(count / CHUNK_SIZE)))


# ---------------------------------------------------------------------------
# training sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainingSetSpec:
    """Training set T_a(n): in-control, scale-shift and location-shift blocks.

    Shift parameters are drawn per tuple: sigma uniform on (1, 11], |mu| uniform
    on (0, 10] with an equiprobable sign.  Each shifted block is spread as evenly
    as possible over every (k, positions) cell with k >= 1.
    """

    a: int
    n: int
    unit: int = 100_000
    sigma_range: tuple[float, float] = (1.0, 11.0)
    mu_magnitude_range: tuple[float, float] = (0.0, 10.0)

    def __post_init__(self):
        if self.a not in MIX_RATIOS:
            raise DatasetError(f"a must be one of {MIX_RATIOS}, got {self.a}")
        if not 1 <= self.n <= MAX_N:
            raise DatasetError(f"n must lie in 1..{MAX_N}, got {self.n}")
        if self.unit < 1:
            raise DatasetError(f"unit must be positive, got {self.unit}")
        lo, hi = self.sigma_range
        if not (lo >= 1.0 and hi > lo):
            raise DatasetError(f"bad sigma range {self.sigma_range}")
        lo, hi = self.mu_magnitude_range
        if not (lo >= 0.0 and hi > lo):
            raise DatasetError(f"bad mu range {self.mu_magnitude_range}")

    @property
    def block_size(self) -> int:
        return 2 ** (self.n - 1) * self.unit

    @property
    def in_control_count(self) -> int:
        return self.a * self.block_size

    @property
    def total(self) -> int:
        return self.in_control_count + 2 * self.block_size

    def cells(self) -> list[tuple[int, ...]]:
        return [pos for k in range(1, self.n + 1) for pos in enumerate_patterns(self.n, k)]

    def composition(self) -> dict:
        """Exact record counts per block and per (k, positions) cell."""
        cells = self.cells()
        alloc = _split(self.block_size, len(cells))
        per_cell = {"".join(map(str, c)): m for c, m in zip(cells, alloc)}
        return {
            "in_control": self.in_control_count,
            "scale_shift": self.block_size,
            "location_shift": self.block_size,
            "scale_shift_cells": per_cell,
            "location_shift_cells": dict(per_cell),
            "total": self.total,
        }


def iter_training_chunks(spec: TrainingSetSpec, rng: RngStream) -> Iterator[TupleBatch]:
    """Unshuffled training chunks in block order; chunk i uses substream i."""
    jobs: list[tuple[str, tuple[int, ...], int]] = []
    jobs += [("in", (), c) for c in _chunks(spec.in_control_count)]
    cells = spec.cells()
    for kind in ("scale", "location"):
        for cell, count in zip(cells, _split(spec.block_size, len(cells))):
            jobs += [(kind, cell, c) for c in _chunks(count) if c]
    s_lo, s_hi = spec.sigma_range
    m_lo, m_hi = spec.mu_magnitude_range
    for index, (kind, cell, count) in enumerate(jobs):
        sub = rng.substream(index)
        if kind == "in":
            yield generate_block(spec.n, (), count, 0.0, 1.0, sub)
            continue
        values = sub.normal((count, spec.n))
        u = sub.uniform(count)
        if kind == "scale":
            sigma = s_hi - (s_hi - s_lo) * u  # (lo, hi]
            mu = np.zeros(count)
        else:
            magnitude = m_hi - (m_hi - m_lo) * u  # (lo, hi]
            sign = np.where(sub.uniform(count) < 0.5, -1.0, 1.0)
            mu = sign * magnitude
            sigma = np.ones(count)
        cols = [p - 1 for p in cell]
        values[:, cols] = mu[:, None] + sigma[:, None] * values[:, cols]
        yield TupleBatch(
            values,
            np.full(count, len(cell), dtype=np.int8),
            np.full(count, mask_bits(cell), dtype=np.uint8),
            mu,
            sigma,
        )


def build_training_set(
    spec: TrainingSetSpec,
    rng: RngStream | RngState,
    max_records: int = DEFAULT_MAX_RECORDS,
) -> TupleBatch:
    """Materialize T_a(n) in a deterministic shuffled order."""
    if isinstance(rng, RngState):
        rng = RngStream(rng)
    if spec.total > max_records:
        raise OverflowError(
            f"training set of {spec.total} records exceeds the limit of {max_records}; "
            "stream it with iter_training_chunks instead"
        )
    batch = TupleBatch.concat(iter_training_chunks(spec, rng.substream(0)))
    return batch.take(rng.substream(1).permutation(len(batch)))


# ---------------------------------------------------------------------------
# test sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestSetSpec:
    """Test set D(n, 0, 1) (k = 0) or D(n, k, mu, sigma) (k >= 1)."""

    __test__ = False  # keep pytest from collecting this class

    n: int
    k: int
    mu: float = 0.0
    sigma: float = 1.0
    replicates_per_pattern: int = 100_000
    in_control_count: int = 1_000_000

    def __post_init__(self):
        if not 1 <= self.n <= MAX_N:
            raise DatasetError(f"n must lie in 1..{MAX_N}, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise DatasetError(f"k must lie in 0..n, got k={self.k}, n={self.n}")
        if self.k == 0 and (self.mu != 0.0 or self.sigma != 1.0):
            raise DatasetError("D(n, 0, 1) requires mu=0, sigma=1")
        if self.k > 0 and not (abs(self.mu) > 0 or self.sigma > 1):
            raise DatasetError("an out-of-control test set needs |mu| > 0 or sigma > 1")
        if self.replicates_per_pattern < 1 or self.in_control_count < 1:
            raise DatasetError("test set sizes must be positive")

    @property
    def patterns(self) -> list[tuple[int, ...]]:
        return enumerate_patterns(self.n, self.k)

    @property
    def total(self) -> int:
        if self.k == 0:
            return self.in_control_count
        return len(self.patterns) * self.replicates_per_pattern


def iter_test_chunks(spec: TestSetSpec, rng: RngStream) -> Iterator[TupleBatch]:
    if spec.k == 0:
        jobs = [((), c) for c in _chunks(spec.in_control_count)]
    else:
        jobs = [(pos, c) for pos in spec.patterns for c in _chunks(spec.replicates_per_pattern)]
    for index, (positions, count) in enumerate(jobs):
        yield generate_block(spec.n, positions, count, spec.mu, spec.sigma, rng.substream(index))


def build_test_set(spec: TestSetSpec, rng: RngStream | RngState) -> TupleBatch:
    if isinstance(rng, RngState):
        rng = RngStream(rng)
    return TupleBatch.concat(iter_test_chunks(spec, rng))


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

CSV_HEADER = ["n", "k", "mask", "mu", "sigma", "label", "x1", "x2", "x3", "x4"]


def write_csv(batches, path, append: bool = False) -> int:
    """Write tuples as CSV.  ``mask`` is a 0/1 string over positions 1..n;
    unused coordinates are empty.  Returns the number of rows written."""
    if isinstance(batches, TupleBatch):
        batches = [batches]
    rows = 0
    with Path(path).open("a" if append else "w", newline="") as fh:
        if not append:
            fh.write(",".join(CSV_HEADER) + "\n")
        for batch in batches:
            n = batch.n
            for i in range(len(batch)):
                bits = int(batch.mask[i])
                mask = "".join("1" if bits >> j & 1 else "0" for j in range(n))
                xs = [repr(float(v)) for v in batch.values[i]] + [""] * (MAX_N - n)
                fh.write(
                    f"{n},{int(batch.k[i])},{mask},{float(batch.mu[i])!r},"
                    f"{float(batch.sigma[i])!r},{int(batch.k[i] >= 1)},{','.join(xs)}\n"
                )
            rows += len(batch)
    return rows


def read_csv(path) -> TupleBatch:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split(",") != CSV_HEADER:
        raise DatasetError(f"{path}: missing or wrong CSV header")
    rows = [line.split(",") for line in lines[1:] if line]
    if not rows:
        raise DatasetError(f"{path}: no records")
    n = int(rows[0][0])
    try:
        values = np.array([[float(v) for v in r[6:6 + n]] for r in rows])
        k = np.array([int(r[1]) for r in rows], dtype=np.int8)
        mask = np.array([int(r[2][::-1], 2) for r in rows], dtype=np.uint8)
        mu = np.array([float(r[3]) for r in rows])
        sigma = np.array([float(r[4]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise DatasetError(f"{path}: malformed row ({exc})") from None
    return TupleBatch(values, k, mask, mu, sigma)


def _record_dtype(n: int) -> np.dtype:
    return np.dtype([
        ("k", "u1"), ("mask", "u1"), ("mu", "<f8"), ("sigma", "<f8"),
        ("label", "u1"), ("x", "<f8", (n,)),
    ])


def write_binary(batches, path, n: int) -> int:
    """Compact format: ``QCDS``, version byte, n (u8), record count (u64), then
    packed little-endian records ``k, mask, mu, sigma, label, x[n]``."""
    if isinstance(batches, TupleBatch):
        batches = [batches]
    dtype = _record_dtype(n)
    count = 0
    with Path(path).open("wb") as fh:
        fh.write(DATASET_MAGIC + struct.pack("<BBQ", DATASET_VERSION, n, 0))
        for batch in batches:
            if batch.n != n:
                raise DatasetError(f"batch has n={batch.n}, file has n={n}")
            rec = np.empty(len(batch), dtype=dtype)
            rec["k"], rec["mask"] = batch.k, batch.mask
            rec["mu"], rec["sigma"] = batch.mu, batch.sigma
            rec["label"], rec["x"] = batch.label, batch.values
            fh.write(rec.tobytes())
            count += len(batch)
        fh.seek(len(DATASET_MAGIC) + 2)
        fh.write(struct.pack("<Q", count))
    return count


def read_binary(path) -> TupleBatch:
    data = Path(path).read_bytes()
    head = len(DATASET_MAGIC) + 10
    if len(data) < head or data[:4] != DATASET_MAGIC:
        raise DatasetError(f"{path}: not a QCDS dataset file")
    version, n, count = struct.unpack("<BBQ", data[4:head])
    if version != DATASET_VERSION:
        raise DatasetError(f"{path}: unsupported dataset version {version}")
    dtype = _record_dtype(n)
    if len(data) != head + count * dtype.itemsize:
        raise DatasetError(f"{path}: truncated or oversized dataset body")
    rec = np.frombuffer(data, dtype=dtype, offset=head, count=count)
    return TupleBatch(
        rec["x"].copy(), rec["k"].astype(np.int8), rec["mask"].copy(),
        rec["mu"].copy(), rec["sigma"].copy(),
    )
