"""Monte Carlo rejection rates, comparison tables and the critical-error report.

A *classifier* here is any callable mapping an ``(N, n)`` array of tuples to a
boolean rejection vector: :class:`qcnn.analytic.StatQCFunction` and
:class:`qcnn.cnn.NetworkClassifier` both qualify.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy import stats

from .analytic import GridSpec, Scenario, decision_limit, p_reject_closed
from .datasets import TestSetSpec, iter_test_chunks
from .numerics import RngStream, erfc

Classifier = Callable[[np.ndarray], np.ndarray]

CSV_COLUMNS = ["a", "n", "k", "mu", "sigma", "N", "p_n", "p_s", "delta_p", "delta_p_rel", "p_value"]


class DegenerateVarianceError(ValueError):
    """The normal approximation is unusable: N p0 (1 - p0) < 5."""


# ---------------------------------------------------------------------------
# Monte Carlo estimation
# ---------------------------------------------------------------------------

def count_rejections(classifier: Classifier, spec: TestSetSpec, rng: RngStream) -> tuple[int, int]:
    """Number of rejected tuples in a freshly simulated test set, and its size."""
    rejected = total = 0
    for chunk in iter_test_chunks(spec, rng):
        decision = np.asarray(classifier(chunk.values), dtype=bool)
        if decision.shape != (len(chunk),):
            raise ValueError(f"classifier returned shape {decision.shape} for {len(chunk)} tuples")
        rejected += int(decision.sum())
        total += len(chunk)
    return rejected, total


def estimate_p_mc(classifier: Classifier, spec: TestSetSpec, rng: RngStream) -> tuple[float, int]:
    rejected, total = count_rejections(classifier, spec, rng)
    return rejected / total, total


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def delta_p(p_n: float, p_s: float) -> float:
    return p_n - p_s


def delta_p_rel(p_n: float, p_s: float) -> float:
    if p_s == 0:
        raise ValueError("relative difference undefined for p_s = 0")
    return (p_n - p_s) / p_s


def proportion_p_value(successes: int, n: int, p0: float) -> float:
    """Two-sided normal-approximation test of ``successes / n`` against ``p0``."""
    if not 0 <= successes <= n:
        raise ValueError(f"successes must lie in 0..{n}, got {successes}")
    if not 0.0 < p0 < 1.0:
        raise ValueError(f"p0 must lie in (0, 1), got {p0}")
    variance = p0 * (1.0 - p0)
    if variance * n < 5:
        raise DegenerateVarianceError(f"n p0 (1 - p0) = {variance * n:.3g} < 5")
    z = (successes / n - p0) / math.sqrt(variance / n)
    return min(1.0, erfc(abs(z) / math.sqrt(2.0)))


def row_p_value(successes: int, n: int, p0: float) -> float:
    """Normal approximation where valid, exact binomial test otherwise."""
    try:
        return proportion_p_value(successes, n, p0)
    except (DegenerateVarianceError, ValueError):
        return float(stats.binomtest(successes, n, min(max(p0, 0.0), 1.0)).pvalue)


# ---------------------------------------------------------------------------
# comparison tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalRow:
    a: int
    n: int
    k: int
    mu: float
    sigma: float
    sample_size: int
    p_n: float
    p_s: float
    delta_p: float
    delta_p_rel: float
    p_value: float
    rejected: int = -1

    @classmethod
    def build(cls, a, scn: Scenario, rejected: int, total: int, p_s: float) -> "EvalRow":
        p_n = rejected / total
        rel = delta_p_rel(p_n, p_s) if p_s > 0 else math.nan
        return cls(a, scn.n, scn.k, scn.mu, scn.sigma, total, p_n, p_s,
                   delta_p(p_n, p_s), rel, row_p_value(rejected, total, p_s), rejected)

    @property
    def se(self) -> float:
        """Null standard error of p_n around p_s."""
        return binomial_se(self.p_s, self.sample_size)

    def csv_fields(self) -> list[str]:
        return [
            str(self.a), str(self.n), str(self.k), f"{self.mu:.6f}", f"{self.sigma:.6f}",
            str(self.sample_size), f"{self.p_n:.6f}", f"{self.p_s:.6f}", f"{self.delta_p:.6f}",
            f"{self.delta_p_rel:.6f}", f"{self.p_value:.6f}",
        ]


@dataclass
class Comparison:
    """Rows of one (a, n) comparison plus the matched false-rejection data."""

    a: int
    n: int
    p_fr: float
    limit: float
    fr_sample_size: int
    rows: list[EvalRow]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def matched_limit(classifier: Classifier, n: int, rng: RngStream, in_control_count: int,
                  p_fr: float | None = None) -> tuple[float, float, int]:
    """``(p_fr, l, N)``: the classifier's false-rejection rate and the limit
    that gives the statistical rule the same rate.  A known ``p_fr`` skips the
    simulation (``N = 0``)."""
    total = 0
    if p_fr is None:
        rejected, total = count_rejections(
            classifier, TestSetSpec(n, 0, in_control_count=in_control_count), rng
        )
        p_fr = rejected / total
    if not 0.0 < p_fr < 1.0:
        raise ValueError(
            f"false-rejection rate {p_fr} cannot be matched by a limit rule (needs 0 < P < 1)"
        )
    return p_fr, decision_limit(p_fr, n), total


def compare(
    a: int,
    n: int,
    classifier: Classifier,
    grid: GridSpec | None,
    rng: RngStream,
    *,
    replicates: int = 100_000,
    in_control_count: int = 1_000_000,
    p_fr: float | None = None,
    workers: int = 1,
) -> Comparison:
    """Classifier rejection rates over the scenario grid against the matched rule.

    Substream 0 of ``rng`` simulates the in-control set, substream ``1 + i`` the
    i-th grid scenario, so the table does not depend on ``workers``.
    """
    grid = grid or GridSpec()
    p_fr, limit, fr_total = matched_limit(classifier, n, rng.substream(0), in_control_count, p_fr)
    scenarios = grid.scenarios(n)

    def run(item):
        index, scn = item
        spec = TestSetSpec(n, scn.k, scn.mu, scn.sigma, replicates_per_pattern=replicates)
        rejected, total = count_rejections(classifier, spec, rng.substream(1 + index))
        return EvalRow.build(a, scn, rejected, total, p_reject_closed(scn, limit))

    items = list(enumerate(scenarios))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, items))
    else:
        rows = [run(item) for item in items]
    return Comparison(a, n, p_fr, limit, fr_total, rows)


def write_rows_csv(rows: Iterable[EvalRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_fields())
    return path


def read_rows_csv(path) -> list[EvalRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_COLUMNS:
            raise ValueError(f"{path}: expected columns {CSV_COLUMNS}, got {header}")
        rows = []
        for line, rec in enumerate(reader, start=2):
            if len(rec) != len(CSV_COLUMNS):
                raise ValueError(f"{path}:{line}: expected {len(CSV_COLUMNS)} fields")
            try:
                a, n, k = int(rec[0]), int(rec[1]), int(rec[2])
                values = [float(v) for v in rec[3:]]
            except ValueError as exc:
                raise ValueError(f"{path}:{line}: {exc}") from None
            mu, sigma, size, p_n, p_s, dp, dpr, pv = values
            rows.append(EvalRow(a, n, k, mu, sigma, int(size), p_n, p_s, dp, dpr, pv))
    return rows


def sign_summary(rows: Iterable[EvalRow]) -> dict[str, dict[str, int]]:
    """Counts of positive / negative / zero differences per ``"n=..,k=.."``."""
    out: dict[str, dict[str, int]] = {}
    for row in rows:
        key = f"n={row.n},k={row.k}"
        bucket = out.setdefault(key, {"positive": 0, "negative": 0, "zero": 0})
        if row.delta_p > 0:
            bucket["positive"] += 1
        elif row.delta_p < 0:
            bucket["negative"] += 1
        else:
            bucket["zero"] += 1
    return out


# ---------------------------------------------------------------------------
# critical errors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalErrorConfig:
    mu_c: float = 2.67
    sigma_c: float = 3.33

    def __post_init__(self):
        if not self.mu_c > 0:
            raise ValueError("critical systematic error must be positive")
        if not self.sigma_c > 1:
            raise ValueError("critical random error must exceed 1")


@dataclass(frozen=True)
class CriticalRow:
    """One (n, k, a) line of the critical-error report.

    ``*_mu`` columns refer to the scenario (mu_c, 1), ``*_sigma`` to (0, sigma_c).
    Monte Carlo columns are NaN when only the limits were supplied.
    """

    n: int
    k: int
    a: int
    p_fr: float
    limit: float
    p_n_mu: float
    p_s_mu: float
    delta_mu: float
    rel_mu: float
    p_value_mu: float
    p_n_sigma: float
    p_s_sigma: float
    delta_sigma: float
    rel_sigma: float
    p_value_sigma: float
    sample_size: int = 0

    @classmethod
    def csv_header(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def csv_fields(self) -> list[str]:
        out = []
        for name, value in asdict(self).items():
            out.append(f"{value:.6f}" if isinstance(value, float) else str(value))
        return out


def critical_scenarios(n: int, k: int, config: CriticalErrorConfig) -> tuple[Scenario, Scenario]:
    return Scenario(n, k, config.mu_c, 1.0), Scenario(n, k, 0.0, config.sigma_c)


def critical_row_from_limit(n, k, a, p_fr, limit, config: CriticalErrorConfig,
                            p_n_mu=math.nan, p_n_sigma=math.nan) -> CriticalRow:
    """Exact rule probabilities for a supplied (P_FR, l); differences are filled
    in when the classifier's probabilities are given too."""
    scn_mu, scn_sigma = critical_scenarios(n, k, config)
    ps_mu = p_reject_closed(scn_mu, limit)
    ps_sigma = p_reject_closed(scn_sigma, limit)
    return CriticalRow(
        n, k, a, p_fr, limit,
        p_n_mu, ps_mu, delta_p(p_n_mu, ps_mu), delta_p_rel(p_n_mu, ps_mu), math.nan,
        p_n_sigma, ps_sigma, delta_p(p_n_sigma, ps_sigma), delta_p_rel(p_n_sigma, ps_sigma), math.nan,
    )


def critical_error_report(
    classifiers: Mapping[tuple[int, int], Classifier],
    config: CriticalErrorConfig,
    rng: RngStream,
    *,
    replicates: int = 100_000,
    in_control_count: int = 1_000_000,
    p_fr: Mapping[tuple[int, int], float] | None = None,
) -> list[CriticalRow]:
    """Critical-error detection for classifiers keyed by ``(n, a)``, n >= 2.

    Substream ``i`` of ``rng`` belongs to the i-th key in sorted order; inside
    it substream 0 simulates the in-control set and ``1 + j`` the scenarios.
    """
    rows = []
    for index, (n, a) in enumerate(sorted(classifiers)):
        if n < 2:
            continue
        clf = classifiers[(n, a)]
        sub = rng.substream(index)
        known = (p_fr or {}).get((n, a))
        fr, limit, _ = matched_limit(clf, n, sub.substream(0), in_control_count, known)
        for j, k in enumerate(range(2, n + 1)):
            measured = []
            for m, scn in enumerate(critical_scenarios(n, k, config)):
                spec = TestSetSpec(n, k, scn.mu, scn.sigma, replicates_per_pattern=replicates)
                rejected, total = count_rejections(clf, spec, sub.substream(1 + 2 * j + m))
                measured.append((rejected, total))
            (r_mu, total), (r_sigma, _) = measured
            base = critical_row_from_limit(n, k, a, fr, limit, config, r_mu / total, r_sigma / total)
            rows.append(CriticalRow(
                **{**asdict(base),
                   "p_value_mu": row_p_value(r_mu, total, base.p_s_mu),
                   "p_value_sigma": row_p_value(r_sigma, total, base.p_s_sigma),
                   "sample_size": total}
            ))
    return rows


def write_critical_csv(rows: Iterable[CriticalRow], path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CriticalRow.csv_header())
        for row in rows:
            writer.writerow(row.csv_fields())
    return path


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    """A pair of rows ordered against the expected monotone direction."""

    item: int
    description: str
    low: dict
    high: dict
    difference: float
    tolerance: float


_ITEMS = {
    1: "rejection increases with |mu| (sigma = 1)",
    2: "rejection increases with sigma (mu = 0)",
    3: "rejection increases with k",
    4: "rejection decreases with a",
    5: "rejection with k = n increases with n",
    6: "rejection at fixed k decreases with n",
}


def monotonicity_scan(rows: Iterable[EvalRow], column: str = "p_n", z: float = 4.0) -> list[Finding]:
    """Flag ordered row pairs that break the expected monotone trends.

    A pair is flagged only when it moves against the expected direction by more
    than ``z`` combined binomial standard errors (zero for the exact ``p_s``).
    Consecutive pairs along each axis are compared.
    """
    rows = list(rows)

    def value(r):
        return getattr(r, column)

    def se(r):
        if column == "p_s":
            return 0.0
        return binomial_se(value(r), r.sample_size)

    def key(r):
        return {"a": r.a, "n": r.n, "k": r.k, "mu": r.mu, "sigma": r.sigma}

    findings: list[Finding] = []

    def scan(item, groups, order, increasing):
        for members in groups.values():
            members = sorted(members, key=order)
            for lo, hi in zip(members, members[1:]):
                tol = z * math.hypot(se(lo), se(hi))
                diff = value(hi) - value(lo)
                bad = diff < -tol if increasing else diff > tol
                if bad:
                    findings.append(Finding(item, _ITEMS[item], key(lo), key(hi), diff, tol))

    def group(pred, keyfn):
        out = defaultdict(list)
        for r in rows:
            if pred(r):
                out[keyfn(r)].append(r)
        return out

    scan(1, group(lambda r: r.sigma == 1.0, lambda r: (r.a, r.n, r.k)), lambda r: abs(r.mu), True)
    scan(2, group(lambda r: r.mu == 0.0, lambda r: (r.a, r.n, r.k)), lambda r: r.sigma, True)
    scan(3, group(lambda r: True, lambda r: (r.a, r.n, r.mu, r.sigma)), lambda r: r.k, True)
    scan(4, group(lambda r: True, lambda r: (r.n, r.k, r.mu, r.sigma)), lambda r: r.a, False)
    scan(5, group(lambda r: r.k == r.n, lambda r: (r.a, r.mu, r.sigma)), lambda r: r.n, True)
    scan(6, group(lambda r: True, lambda r: (r.a, r.k, r.mu, r.sigma)), lambda r: r.n, False)
    return findings
