import itertools
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import T_CDF_ORACLE
from scorefeat.mushra import (
    DegenerateTestError,
    MushraError,
    MushraResponse,
    all_pairs_report,
    betainc,
    load_responses,
    summarize,
    summarize_scores,
    t_cdf,
    welch_t_test,
)

SAMPLE_A = [41.0, 63.6, 51.7, 83.7, 43.9, 70.2, 59.1, 69.0, 65.4, 47.0, 43.3, 69.8, 70.1, 57.6, 55.9,
            46.1, 54.4, 12.3, 65.4, 79.3, 41.5, 63.7, 64.7, 55.1, 62.9, 72.0, 70.4, 64.0, 54.7, 63.1]
SAMPLE_B = [65.0, 40.6, 55.3, 74.8, 70.8, 81.1, 61.8, 75.5, 73.3, 58.0, 76.4, 68.7, 95.8, 69.7, 73.3,
            55.1, 92.3, 59.3, 59.6, 69.5, 78.2, 49.5, 71.9, 114.5, 59.3, 73.6, 37.5, 67.2, 75.4, 77.5]
# two-sided tail 2 * integral_{|t|}^inf of the t density at the Welch df, same quadrature
SAMPLE_P_ORACLE = 0.006992668899513772

HEADER = "listener_id,chunk_id,system_id,score\n"


def test_load_responses():
    rows = load_responses((HEADER + "L1,c1,sysA,70\nL1,c1,sysB,40.5\nL2,c1,sysA,88\n").encode())
    assert len(rows) == 3
    assert rows[1] == MushraResponse("L1", "c1", "sysB", 40.5)


def test_load_responses_errors():
    with pytest.raises(MushraError, match="row 3.*105"):
        load_responses(HEADER + "L1,c1,sysA,70\nL1,c2,sysA,105\n")
    with pytest.raises(MushraError, match="duplicate"):
        load_responses(HEADER + "L1,c1,sysA,70\nL1,c1,sysA,71\n")
    with pytest.raises(MushraError, match="missing column.*score"):
        load_responses("listener_id,chunk_id,system_id\nL1,c1,sysA\n")
    with pytest.raises(MushraError, match="not a number"):
        load_responses(HEADER + "L1,c1,sysA,good\n")


def test_summary_examples():
    s = summarize_scores("x", [60.45, 60.45])
    assert (s.mean, s.std) == (60.45, 0.0)
    s = summarize_scores("x", [0, 50, 100])
    assert (s.mean, s.q2) == (50.0, 50.0)


def interpolated_quartile_oracle(xs, p):
    # order statistics at 1-based rank 1 + p (n - 1), blended by the fractional part
    ys = sorted(xs)
    rank = 1 + p * (len(ys) - 1)
    k = int(rank)
    frac = rank - k
    below = ys[k - 1]
    above = ys[k] if k < len(ys) else ys[-1]
    return below * (1 - frac) + above * frac


def test_quartiles_by_interpolation():
    s = summarize_scores("x", [77, 26, 61, 50])
    # frozen from the oracle above
    assert (s.q1, s.q2, s.q3) == (44.0, 55.5, 65.0)
    assert [interpolated_quartile_oracle([26, 50, 61, 77], p) for p in (0.25, 0.5, 0.75)] == [44.0, 55.5, 65.0]
    assert (s.min, s.max, s.n) == (26.0, 77.0, 4)


@given(st.lists(st.floats(0, 100), min_size=1, max_size=40))
def test_quartile_monotonic(xs):
    s = summarize_scores("x", xs)
    assert s.min <= s.q1 <= s.q2 <= s.q3 <= s.max
    for p, q in ((0.25, s.q1), (0.5, s.q2), (0.75, s.q3)):
        assert q == pytest.approx(interpolated_quartile_oracle(xs, p), abs=1e-9)


def test_summarize_filters_system():
    rs = [MushraResponse("L", "c", "a", 10), MushraResponse("L", "c", "b", 90)]
    assert summarize(rs, "b").mean == 90.0
    with pytest.raises(MushraError, match="no responses"):
        summarize(rs, "z")


def test_welch_identical_samples():
    result = welch_t_test([1, 2, 3], [1, 2, 3])
    assert result.t_statistic == 0.0 and result.p_value == 1.0


def test_welch_degenerate():
    with pytest.raises(DegenerateTestError):
        welch_t_test([0, 0, 0, 0], [1, 1, 1, 1])
    with pytest.raises(MushraError):
        welch_t_test([1], [1, 2])


def test_welch_against_quadrature():
    result = welch_t_test(SAMPLE_A, SAMPLE_B)
    assert abs(result.p_value - SAMPLE_P_ORACLE) <= 1e-9
    # Welch-Satterthwaite df recomputed by hand
    va = sum((x - sum(SAMPLE_A) / 30) ** 2 for x in SAMPLE_A) / 29
    vb = sum((x - sum(SAMPLE_B) / 30) ** 2 for x in SAMPLE_B) / 29
    df = (va / 30 + vb / 30) ** 2 / ((va / 30) ** 2 / 29 + (vb / 30) ** 2 / 29)
    assert result.degrees_of_freedom == pytest.approx(df, rel=1e-12)


def test_t_cdf_grid():
    for df, values in T_CDF_ORACLE.items():
        assert t_cdf(0.0, df) == 0.5
        for t, v in zip((1, 2, 5), values):
            assert abs(t_cdf(t, df) - v) <= 1e-9
            assert abs(t_cdf(-t, df) - (1 - v)) <= 1e-9


def test_t_cdf_live_quadrature():
    integrate = pytest.importorskip("scipy.integrate")

    def pdf(x, df):
        return math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
                        - (df + 1) / 2 * math.log1p(x * x / df))

    for df in (1, 2, 10, 100):
        for t in (-5, -2, -1, 1, 2, 5):
            area, _ = integrate.quad(pdf, 0, abs(t), args=(df,), epsabs=1e-14, epsrel=1e-14)
            expected = 0.5 + math.copysign(area, t)
            assert abs(t_cdf(t, df) - expected) <= 1e-9


def test_betainc_known_values():
    # I_x(1, 1) = x ; I_x(a, 1) = x**a ; I_0.5(a, a) = 0.5
    assert betainc(1, 1, 0.3) == pytest.approx(0.3, abs=1e-14)
    assert betainc(3, 1, 0.7) == pytest.approx(0.343, abs=1e-14)
    assert betainc(4.5, 4.5, 0.5) == pytest.approx(0.5, abs=1e-14)
    assert betainc(2, 3, 0.0) == 0.0 and betainc(2, 3, 1.0) == 1.0


samples = st.lists(st.integers(0, 100).map(float), min_size=2, max_size=30).filter(lambda xs: len(set(xs)) > 1)


@settings(max_examples=100, deadline=None)
@given(samples, samples)
def test_welch_symmetry(a, b):
    ab, ba = welch_t_test(a, b), welch_t_test(b, a)
    assert ab.t_statistic == -ba.t_statistic
    assert ab.p_value == ba.p_value
    assert 0.0 <= ab.p_value <= 1.0


def test_location_scale_invariance():
    base = welch_t_test(SAMPLE_A, SAMPLE_B)
    shifted = welch_t_test([x + 17.0 for x in SAMPLE_A], [x + 17.0 for x in SAMPLE_B])
    scaled = welch_t_test([x * 0.75 for x in SAMPLE_A], [x * 0.75 for x in SAMPLE_B])
    for other in (shifted, scaled):
        assert abs(other.t_statistic - base.t_statistic) <= 1e-12
        assert abs(other.p_value - base.p_value) <= 1e-12


def responses_for(system, scores):
    return [MushraResponse(f"L{i}", f"c{i}", system, s) for i, s in enumerate(scores)]


def test_all_pairs_three_systems():
    rs = (responses_for("ref", [90, 80, 85, 95]) + responses_for("sys", [60, 55, 70, 65])
          + responses_for("anchor", [20, 30, 25, 35]))
    report = all_pairs_report(rs)
    assert [(t.system_a, t.system_b) for t in report.tests] == [("anchor", "ref"), ("anchor", "sys"), ("ref", "sys")]
    assert [s.system_id for s in report.summaries] == ["anchor", "ref", "sys"]
    data = json.loads(report.to_json())
    assert len(data["tests"]) == 3 and all("flagged" in t for t in data["tests"])
    lines = report.to_csv().splitlines()
    assert lines[0].startswith("record,system_id") and len(lines) == 1 + 3 + 3
    assert json.loads(report.raw_json())["sys"] == [60, 55, 70, 65]


def test_identical_multisets_not_flagged():
    rs = responses_for("a", [10, 20, 30, 40]) + responses_for("b", [40, 30, 20, 10])
    report = all_pairs_report(rs)
    assert report.tests[0].p_value == 1.0
    assert not report.flagged(report.tests[0])


def test_single_system_rejected():
    with pytest.raises(MushraError, match="at least 2"):
        all_pairs_report(responses_for("a", [1, 2]))


def test_pairs_are_all_combinations():
    systems = ["d", "a", "c", "b"]
    rs = [r for k, s in enumerate(systems) for r in responses_for(s, [k, k + 3, k + 5])]
    report = all_pairs_report(rs)
    assert [(t.system_a, t.system_b) for t in report.tests] == list(itertools.combinations("abcd", 2))
