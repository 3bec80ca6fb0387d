"""MUSHRA response aggregation: per-system summaries and Welch t-tests.

The Student-t CDF is evaluated through the regularized incomplete beta
function, itself computed by a modified-Lentz continued fraction.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

CF_TOL = 1e-15
CF_MAX_ITER = 100_000
_TINY = 1e-300

REQUIRED_COLUMNS = ("listener_id", "chunk_id", "system_id", "score")


class MushraError(ValueError):
    pass


class DegenerateTestError(MushraError):
    pass


@dataclass(frozen=True)
class MushraResponse:
    listener_id: str
    chunk_id: str
    system_id: str
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 100.0:
            raise MushraError(f"score {self.score} outside [0, 100]")


@dataclass(frozen=True)
class SystemSummary:
    system_id: str
    n: int
    mean: float
    std: float
    q1: float
    q2: float
    q3: float
    min: float
    max: float


@dataclass(frozen=True)
class PairwiseTest:
    system_a: str
    system_b: str
    t_statistic: float
    degrees_of_freedom: float
    p_value: float


# ---------------------------------------------------------------------------
# Special functions


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    ``y`` may carry ``1 - x`` computed without cancellation.
    """
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(y))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, y) / b


def _t_tail_args(t: float, df: float) -> tuple[float, float]:
    t2 = t * t
    return df / (df + t2), t2 / (df + t2)


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t == 0:
        return 1.0
    x, y = _t_tail_args(t, df)
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, x, y)))


def t_cdf(t: float, df: float) -> float:
    if t == 0:
        return 0.5
    tail = 0.5 * t_two_sided_p(t, df)
    return 1.0 - tail if t > 0 else tail


# ---------------------------------------------------------------------------
# Descriptive statistics and tests


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _sample_var(xs: Sequence[float]) -> float:
    m = _mean(xs)
    return math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def quantile(sorted_xs: Sequence[float], p: float) -> float:
    """Linear interpolation between order statistics at rank ``p * (n - 1)``."""
    n = len(sorted_xs)
    h = (n - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, n - 1)
    return sorted_xs[lo] + (h - lo) * (sorted_xs[hi] - sorted_xs[lo])


def summarize_scores(system_id: str, scores: Sequence[float]) -> SystemSummary:
    if not scores:
        raise MushraError(f"no responses for system {system_id!r}")
    xs = sorted(float(s) for s in scores)
    std = math.sqrt(_sample_var(xs)) if len(xs) > 1 else 0.0
    return SystemSummary(
        system_id, len(xs), _mean(xs), std,
        quantile(xs, 0.25), quantile(xs, 0.5), quantile(xs, 0.75), xs[0], xs[-1],
    )


def summarize(responses: Iterable[MushraResponse], system_id: str) -> SystemSummary:
    return summarize_scores(system_id, [r.score for r in responses if r.system_id == system_id])


def welch_t_test(a: Sequence[float], b: Sequence[float],
                 system_a: str = "a", system_b: str = "b") -> PairwiseTest:
    """Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom."""
    if len(a) < 2 or len(b) < 2:
        raise MushraError("each sample needs at least 2 observations")
    va, vb = _sample_var(a), _sample_var(b)
    if va == 0.0 and vb == 0.0:
        raise DegenerateTestError("both samples have zero variance")
    ea, eb = va / len(a), vb / len(b)
    se2 = ea + eb
    t = (_mean(a) - _mean(b)) / math.sqrt(se2)
    df = se2 * se2 / (ea * ea / (len(a) - 1) + eb * eb / (len(b) - 1))
    return PairwiseTest(system_a, system_b, t, df, t_two_sided_p(t, df))


# ---------------------------------------------------------------------------
# I/O and reports


def load_responses(data: bytes | str) -> list[MushraResponse]:
    text = data.decode("utf-8-sig") if isinstance(data, (bytes, bytearray)) else data
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise MushraError(f"missing column(s): {', '.join(missing)}")
    out: list[MushraResponse] = []
    seen: dict[tuple[str, str, str], int] = {}
    for row_no, row in enumerate(reader, 2):
        try:
            score = float(row["score"])
        except (TypeError, ValueError):
            raise MushraError(f"row {row_no}: score {row['score']!r} is not a number") from None
        if not 0.0 <= score <= 100.0:
            raise MushraError(f"row {row_no}: score {score} outside [0, 100]")
        key = (row["listener_id"], row["chunk_id"], row["system_id"])
        if key in seen:
            raise MushraError(f"row {row_no}: duplicate response {key} (first at row {seen[key]})")
        seen[key] = row_no
        out.append(MushraResponse(*key, score))
    return out


@dataclass
class MushraReport:
    summaries: list[SystemSummary]
    tests: list[PairwiseTest]
    alpha: float = 0.001
    raw_scores: dict[str, list[float]] = field(default_factory=dict)

    def flagged(self, test: PairwiseTest) -> bool:
        return test.p_value < self.alpha

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "summaries": [asdict(s) for s in self.summaries],
            "tests": [dict(asdict(t), flagged=self.flagged(t)) for t in self.tests],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def raw_json(self) -> str:
        return json.dumps(self.raw_scores, sort_keys=True)

    def to_csv(self) -> str:
        cols = ["record", "system_id", "system_b", "n", "mean", "std", "min", "q1", "q2", "q3", "max",
                "t_statistic", "degrees_of_freedom", "p_value", "flagged"]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for s in self.summaries:
            writer.writerow({"record": "summary", "system_id": s.system_id, "n": s.n,
                             **{k: repr(getattr(s, k)) for k in ("mean", "std", "min", "q1", "q2", "q3", "max")}})
        for t in self.tests:
            writer.writerow({"record": "test", "system_id": t.system_a, "system_b": t.system_b,
                             "t_statistic": repr(t.t_statistic), "degrees_of_freedom": repr(t.degrees_of_freedom),
                             "p_value": repr(t.p_value), "flagged": int(self.flagged(t))})
        return buf.getvalue()


def all_pairs_report(responses: Iterable[MushraResponse], systems: Sequence[str] | None = None,
                     alpha: float = 0.001) -> MushraReport:
    """Summaries per system and one Welch test per unordered system pair.

    Pairs come in lexicographic order of the sorted system ids.
    """
    by_system: dict[str, list[float]] = {}
    for r in responses:
        by_system.setdefault(r.system_id, []).append(r.score)
    systems = sorted(systems if systems is not None else by_system)
    if len(systems) < 2:
        raise MushraError("need at least 2 systems for pairwise tests")
    summaries = [summarize_scores(s, by_system.get(s, [])) for s in systems]
    tests = [welch_t_test(by_system[a], by_system[b], a, b)
             for a, b in itertools.combinations(systems, 2)]
    return MushraReport(summaries, tests, alpha, {s: by_system[s] for s in systems})
