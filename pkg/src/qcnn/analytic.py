"""Statistical QC baseline: the symmetric limit rule and its exact rejection power.

A statistical QC function with decision limit ``l`` (in SD units), expected mean
``m`` and SD ``s`` rejects a tuple when any coordinate satisfies
``|x_i - m| > l * s``.  If ``k`` of ``n`` coordinates follow ``N(mu, sigma^2)`` and
the rest ``N(0, 1)``, the rejection probability is

    P = 1 - erf(l / sqrt 2)^(n - k) * A(l, mu, sigma)^k,
    A = (erf((mu + l) / (sigma sqrt 2)) - erf((mu - l) / (sigma sqrt 2))) / 2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .numerics import erf, erfc, erfc_inv

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class StatQCFunction:
    """Decision rule ``any(|x_i - m| > l s)``; calling it on an ``(N, n)`` array
    returns a boolean rejection vector."""

    l: float
    m: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError(f"decision limit must be positive, got {self.l}")
        if not self.s > 0:
            raise ValueError(f"expected SD must be positive, got {self.s}")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        return np.any(np.abs(x - self.m) > self.l * self.s, axis=1)


@dataclass(frozen=True)
class Scenario:
    """Contamination scenario: k of n measurements ~ N(mu, sigma^2)."""

    n: int
    k: int
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not 1 <= self.n:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must lie in 0..n, got k={self.k}, n={self.n}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.k == 0 and (self.mu != 0.0 or self.sigma != 1.0):
            raise ValueError("an in-control scenario (k=0) requires mu=0, sigma=1")


def stat_reject(x, f: StatQCFunction) -> bool:
    """True iff any coordinate of the single tuple ``x`` violates the limit."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("empty measurement tuple")
    return bool(np.any(np.abs(x - f.m) > f.l * f.s))


def acceptance_out(l: float, mu: float, sigma: float) -> float:
    """Probability that one N(mu, sigma^2) measurement lies within [-l, l].

    Evaluated through erfc on the far side of the shift, which keeps full
    relative precision when the probability is tiny.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not l > 0:
        raise ValueError(f"decision limit must be positive, got {l}")
    a = abs(mu)
    scale = sigma * SQRT2
    return 0.5 * (erfc((a - l) / scale) - erfc((a + l) / scale))


def p_accept_closed(scn: Scenario, l: float) -> float:
    """Exact acceptance probability ``1 - p_reject_closed(scn, l)``."""
    inside = erf(l / SQRT2)
    accept = inside ** (scn.n - scn.k)
    if scn.k:
        accept *= acceptance_out(l, scn.mu, scn.sigma) ** scn.k
    return accept


def p_reject_closed(scn: Scenario, l: float) -> float:
    """Exact rejection probability of the limit rule ``l`` under ``scn``."""
    if not l > 0:
        raise ValueError(f"decision limit must be positive, got {l}")
    return 1.0 - p_accept_closed(scn, l)


def decision_limit(p_fr: float, n: int) -> float:
    """Limit ``l`` whose in-control rejection probability over n-tuples is ``p_fr``.

    Closed form ``l = sqrt2 * erfinv((1 - p_fr)^(1/n))``, evaluated through the
    complement ``1 - (1 - p_fr)^(1/n)`` to avoid cancellation, then one Newton
    step on the rejection probability.
    """
    if not 0.0 < p_fr < 1.0:
        raise ValueError(f"false-rejection probability must lie in (0, 1), got {p_fr}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    tail = -math.expm1(math.log1p(-p_fr) / n)
    l = SQRT2 * erfc_inv(tail)
    outside = erfc(l / SQRT2)
    inside = 1.0 - outside
    residual = -math.expm1(n * math.log1p(-outside)) - p_fr
    density = math.sqrt(2.0 / math.pi) * math.exp(-0.5 * l * l)
    slope = -n * inside ** (n - 1) * density
    if slope != 0.0:
        l -= residual / slope
    return l


# ---------------------------------------------------------------------------
# scenario grids
# ---------------------------------------------------------------------------

def _axis(start: float, stop: float, step: float) -> tuple[float, ...]:
    count = int(round((stop - start) / step)) + 1
    # Rounded to 10 decimals so 0.1-steps print and compare cleanly.
    return tuple(round(start + i * step, 10) for i in range(count))


@dataclass(frozen=True)
class GridSpec:
    """Scenario axes: sigma sweep at mu = 0 and mu sweep at sigma = 1."""

    sigmas: tuple[float, ...] = field(default_factory=lambda: _axis(1.1, 7.0, 0.1))
    mus: tuple[float, ...] = field(default_factory=lambda: _axis(0.1, 6.0, 0.1))

    @classmethod
    def from_ranges(cls, sigma=(1.1, 7.0, 0.1), mu=(0.1, 6.0, 0.1)) -> "GridSpec":
        return cls(_axis(*sigma) if sigma else (), _axis(*mu) if mu else ())

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"sigma=1.1:7.0:0.1;mu=0.1:6.0:0.1"``; an omitted axis keeps its
        default and ``sigma=none`` disables an axis."""
        ranges = {"sigma": (1.1, 7.0, 0.1), "mu": (0.1, 6.0, 0.1)}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            name, _, value = part.partition("=")
            name = name.strip().lower()
            if name not in ranges:
                raise ValueError(f"unknown grid axis {name!r}")
            if value.strip().lower() == "none":
                ranges[name] = None
                continue
            bits = value.split(":")
            if len(bits) != 3:
                raise ValueError(f"grid axis must be start:stop:step, got {value!r}")
            start, stop, step = (float(b) for b in bits)
            if step <= 0 or stop < start:
                raise ValueError(f"bad grid range {value!r}")
            ranges[name] = (start, stop, step)
        return cls.from_ranges(ranges["sigma"], ranges["mu"])

    def scenarios(self, n: int) -> list[Scenario]:
        """All grid scenarios for n, ordered by k, then sigma axis, then mu axis."""
        out = []
        for k in range(1, n + 1):
            out.extend(Scenario(n, k, 0.0, s) for s in self.sigmas)
            out.extend(Scenario(n, k, m, 1.0) for m in self.mus)
        return out


def build_ps_grid(n: int, l: float, grid: GridSpec | None = None) -> list[tuple[Scenario, float]]:
    grid = grid or GridSpec()
    return [(scn, p_reject_closed(scn, l)) for scn in grid.scenarios(n)]


def write_ps_grid_csv(path, n: int, a: int, l: float, table) -> None:
    """CSV with columns ``n,k,a,mu,sigma,l,p_s`` at 6 decimals."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "k", "a", "mu", "sigma", "l", "p_s"])
        for scn, p in table:
            writer.writerow([n, scn.k, a, f"{scn.mu:.6f}", f"{scn.sigma:.6f}", f"{l:.6f}", f"{p:.6f}"])
