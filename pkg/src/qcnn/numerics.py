"""Error-function numerics and the seedable counter-based random stream.

Random numbers come from Philox4x64-10 (a counter-based generator) keyed by
``(master_seed, stream_id)``.  Substreams are derived by mixing the parent
stream id with an index through the SplitMix64 finalizer, so a stream is fully
described by three 64-bit integers and can be rebuilt anywhere.

Normal deviates use the Box-Muller transform: each pair of normals consumes two
consecutive 64-bit words ``r1, r2``, mapped to ``u = (r >> 11) * 2**-53`` and

    z1 = sqrt(-2 log(1 - u1)) * cos(2 pi u2)
    z2 = sqrt(-2 log(1 - u1)) * sin(2 pi u2)

The 64-bit word stream is platform independent.  The normals are bit-identical
for a fixed numpy build; different libm/SIMD builds may differ in the last ulp.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import special

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)

SEED_ENV_VAR = "QCNN_SEED"


# ---------------------------------------------------------------------------
# error function
# ---------------------------------------------------------------------------

def erf(x):
    """Error function, scalar or elementwise.

    Backed by the Cephes rational approximations in ``scipy.special`` (relative
    error below 1e-15 over the real line).  Evaluated on ``|x|`` and re-signed so
    that ``erf(-x) == -erf(x)`` holds exactly.
    """
    arr = np.asarray(x, dtype=np.float64)
    out = np.copysign(special.erf(np.abs(arr)), arr)
    return float(out) if out.ndim == 0 else out


def erfc(x):
    """Complementary error function ``1 - erf(x)`` without cancellation."""
    out = special.erfc(np.asarray(x, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def _winitzki(p: float, q: float) -> float:
    # Closed-form seed for the inverse, relative error about 2e-3.  ``q`` is
    # 1 - |p| supplied separately so that log(1 - p^2) keeps its precision.
    a = 0.147
    ln = math.log(q) + math.log1p(abs(p))
    t = 2.0 / (math.pi * a) + 0.5 * ln
    return math.sqrt(math.sqrt(t * t - ln / a) - t)


def _inverse(p: float, q: float) -> float:
    """Solve erf(y) = |p| for y >= 0 where q = 1 - |p| is known accurately."""
    y = _winitzki(p, q)
    for _ in range(3):
        # Residual of erf(y) - |p|; the erfc form avoids cancellation near 1.
        if abs(p) >= 0.5:
            r = q - math.erfc(y)
        else:
            r = math.erf(y) - abs(p)
        deriv = _TWO_OVER_SQRT_PI * math.exp(-y * y)
        if deriv == 0.0:
            break
        u = r / deriv
        # Halley step: erf'' / erf' = -2y.
        y -= u / (1.0 + y * u)
    return y


def erf_inv(p: float) -> float:
    """Inverse error function on (-1, 1).

    Seeded with Winitzki's closed form and polished by three Halley iterations
    on ``erf``; ``erf(erf_inv(p))`` matches ``p`` to a few ulp.
    """
    p = float(p)
    if not -1.0 < p < 1.0 or math.isnan(p):
        raise ValueError(f"erf_inv domain is (-1, 1), got {p!r}")
    if p == 0.0:
        return 0.0
    return math.copysign(_inverse(p, 1.0 - abs(p)), p)


def erfc_inv(q: float) -> float:
    """Inverse of ``erfc`` on (0, 1]: the y >= 0 with erfc(y) = q.

    Use this instead of ``erf_inv(1 - q)`` when q is tiny.
    """
    q = float(q)
    if not 0.0 < q <= 1.0:
        raise ValueError(f"erfc_inv domain is (0, 1], got {q!r}")
    if q == 1.0:
        return 0.0
    return _inverse(1.0 - q, q)


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class RngState:
    """Complete description of a position in a random stream.

    ``counter`` counts 64-bit words already consumed from the stream.
    """

    master_seed: int
    stream_id: int = 0
    counter: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id", "counter"):
            value = getattr(self, name)
            if not 0 <= int(value) <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")


def derive_substream(state: RngState, index: int) -> RngState:
    """Child stream ``index`` of ``state`` (counter reset to zero).

    For a fixed parent, distinct indices give distinct stream ids; nesting order
    matters, so ``derive(derive(s, i), j)`` differs from ``derive(derive(s, j), i)``.
    """
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    mixed = (_splitmix64(state.stream_id) * _GOLDEN + index + 1) & _MASK64
    return RngState(state.master_seed, _splitmix64(mixed), 0)


class RngStream:
    """Mutable cursor over the Philox stream described by an :class:`RngState`.

    Not meant to be shared between threads; hand each worker its own
    :meth:`substream`.
    """

    def __init__(self, state: RngState | int):
        if not isinstance(state, RngState):
            state = RngState(int(state))
        self._key = np.array([state.master_seed, state.stream_id], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=self._key)
        self._bitgen.advance(state.counter // 4)
        if state.counter % 4:
            self._bitgen.random_raw(state.counter % 4)
        self._origin = state
        self._counter = state.counter

    @property
    def state(self) -> RngState:
        return RngState(self._origin.master_seed, self._origin.stream_id, self._counter)

    def substream(self, index: int) -> "RngStream":
        return RngStream(derive_substream(self.state, index))

    def raw(self, size: int) -> np.ndarray:
        """Next ``size`` 64-bit words of the stream."""
        size = int(size)
        self._counter += size
        if size == 0:
            return np.empty(0, dtype=np.uint64)
        return self._bitgen.random_raw(size)

    def uniform(self, size) -> np.ndarray:
        """Uniform doubles on [0, 1) with 53 random bits each."""
        shape = (size,) if np.isscalar(size) else tuple(size)
        count = int(np.prod(shape, dtype=np.int64))
        words = self.raw(count)
        return ((words >> np.uint64(11)).astype(np.float64) * 2.0**-53).reshape(shape)

    def normal(self, size, loc: float = 0.0, scale: float = 1.0) -> np.ndarray:
        """Normal deviates by Box-Muller; draws are consumed in pairs."""
        shape = (size,) if np.isscalar(size) else tuple(size)
        count = int(np.prod(shape, dtype=np.int64))
        pairs = (count + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        z = np.empty((pairs, 2))
        z[:, 0] = radius * np.cos(angle)
        z[:, 1] = radius * np.sin(angle)
        z = z.reshape(-1)[:count].reshape(shape)
        if loc != 0.0 or scale != 1.0:
            z = loc + scale * z
        return z

    def permutation(self, count: int) -> np.ndarray:
        """Deterministic random permutation of ``range(count)``."""
        return np.argsort(self.raw(count), kind="stable")


def std_normal(state: RngState, size: int | None = None):
    """Functional form: draw from ``state`` and return ``(values, next_state)``."""
    stream = RngStream(state)
    values = stream.normal(1 if size is None else size)
    return (float(values[0]) if size is None else values), stream.state


def seed_from_env(default: int) -> int:
    """The master seed, overridden by ``$QCNN_SEED`` when set."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return int(default)
    try:
        seed = int(raw.strip(), 10)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be a decimal integer, got {raw!r}") from None
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"{SEED_ENV_VAR} must fit in 64 unsigned bits")
    return seed
