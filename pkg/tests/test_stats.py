from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mutsum import stats


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------

def brute_force_min_u_p(sample_a: list[float], sample_b: list[float]) -> tuple[float, float]:
    """Oracle: U by direct pair counting, p over every label assignment.

    Deliberately avoids the rank-sum formula used by the implementation.
    """
    def u_by_pairs(xs: list[float], ys: list[float]) -> float:
        u = 0.0
        for x in xs:
            for y in ys:
                if x > y:
                    u += 1.0
                elif x == y:
                    u += 0.5
        return u

    n_a, n_b = len(sample_a), len(sample_b)
    u_a = u_by_pairs(sample_a, sample_b)
    u_obs = min(u_a, n_a * n_b - u_a)

    pooled = list(sample_a) + list(sample_b)
    hits = 0
    total = 0
    for combo in itertools.combinations(range(len(pooled)), n_a):
        chosen = set(combo)
        xs = [pooled[i] for i in range(len(pooled)) if i in chosen]
        ys = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        u = u_by_pairs(xs, ys)
        if min(u, n_a * n_b - u) <= u_obs + 1e-9:
            hits += 1
        total += 1
    return u_obs, hits / total


def kappa_from_vectors(confusion: list[list[int]]) -> float:
    """Oracle: expand the confusion matrix into label vectors, then p_o/p_e."""
    xs: list[int] = []
    ys: list[int] = []
    for i, row in enumerate(confusion):
        for j, count in enumerate(row):
            xs.extend([i] * count)
            ys.extend([j] * count)
    n = len(xs)
    p_o = sum(1 for x, y in zip(xs, ys) if x == y) / n
    labels = range(len(confusion))
    p_e = sum((xs.count(l) / n) * (ys.count(l) / n) for l in labels)
    return (p_o - p_e) / (1.0 - p_e)


# ---------------------------------------------------------------------------
# Chi-square
# ---------------------------------------------------------------------------

# Frozen by an exact-fraction hand sum of (O-E)^2/E over this table.
COMPLEXITY_TABLE = [[62, 19], [27, 54], [23, 58], [14, 67]]
COMPLEXITY_CHI2 = 69.03896103896103


def test_chi_square_complexity_table():
    result = stats.chi_square(COMPLEXITY_TABLE)
    assert result.statistic == pytest.approx(COMPLEXITY_CHI2, abs=1e-9)
    assert abs(result.statistic - 69.04) < 0.05
    assert result.degrees_of_freedom == 3
    assert result.p_value < 0.001
    assert result.effect_size == pytest.approx(0.462, abs=0.005)


def test_cramers_v_complexity_table():
    assert stats.cramers_v(COMPLEXITY_TABLE) == pytest.approx(0.4616093728, abs=1e-9)


def test_chi_square_uniform_table_is_zero():
    result = stats.chi_square([[10, 10], [10, 10]])
    assert result.statistic == pytest.approx(0.0, abs=1e-12)
    assert result.p_value == pytest.approx(1.0, abs=1e-12)
    assert stats.cramers_v([[10, 10], [10, 10]]) == pytest.approx(0.0, abs=1e-9)


def test_chi_square_mutation_type_table():
    # Reconstructed from the per-type stacked series; hand-summed value.
    # The published 1.95 is not reproducible from those series (ledgered
    # as a figure-vs-text inconsistency); the frozen oracle value is used.
    table = [[36, 72], [42, 66], [47, 61]]
    result = stats.chi_square(table)
    assert result.statistic == pytest.approx(2.370572864321608, abs=1e-9)
    assert result.degrees_of_freedom == 2
    assert result.p_value == pytest.approx(math.exp(-result.statistic / 2.0), abs=1e-9)


def test_cramers_v_perfect_association():
    assert stats.cramers_v([[50, 0], [0, 50]]) == pytest.approx(1.0, abs=1e-12)


def test_chi_square_rejects_zero_row_and_column():
    with pytest.raises(ValueError):
        stats.chi_square([[0, 0], [5, 5]])
    with pytest.raises(ValueError):
        stats.chi_square([[5, 0], [5, 0]])
    with pytest.raises(ValueError):
        stats.chi_square([[5, 5]])


def test_chi_square_row_permutation_invariance():
    base = stats.chi_square(COMPLEXITY_TABLE)
    for perm in itertools.permutations(COMPLEXITY_TABLE):
        permuted = stats.chi_square([list(r) for r in perm])
        assert permuted.statistic == pytest.approx(base.statistic, abs=1e-9)
        assert permuted.effect_size == pytest.approx(base.effect_size, abs=1e-12)


def test_chi_square_scales_linearly_with_counts():
    base = stats.chi_square(COMPLEXITY_TABLE)
    scaled = stats.chi_square([[5 * c for c in row] for row in COMPLEXITY_TABLE])
    assert scaled.statistic == pytest.approx(5 * base.statistic, abs=1e-7)
    # V is scale-invariant
    assert scaled.effect_size == pytest.approx(base.effect_size, abs=1e-9)


# ---------------------------------------------------------------------------
# Incomplete gamma / survival functions
# ---------------------------------------------------------------------------

@pytest.mark.parametrize(
    "df,x",
    [(1, 3.841458820694124), (2, 5.991464547107979), (3, 7.814727903251179)],
)
def test_chi2_sf_textbook_critical_values(df, x):
    assert stats.chi2_sf(x, df) == pytest.approx(0.05, abs=5e-4)


def test_chi2_sf_closed_forms():
    # df=2: sf(x) = exp(-x/2); df=1: sf(x) = erfc(sqrt(x/2))
    for x in (0.1, 0.5, 1.0, 2.5, 7.0, 20.0):
        assert stats.chi2_sf(x, 2) == pytest.approx(math.exp(-x / 2.0), abs=1e-12)
        assert stats.chi2_sf(x, 1) == pytest.approx(math.erfc(math.sqrt(x / 2.0)), abs=1e-12)


def test_gamma_q_recurrence():
    # Q(a+1, x) = Q(a, x) + x^a e^-x / Gamma(a+1)
    for a in (0.5, 1.0, 1.5, 2.0, 3.5):
        for x in (0.25, 1.0, 2.0, 5.0, 9.0):
            lhs = stats.regularized_gamma_q(a + 1.0, x)
            rhs = stats.regularized_gamma_q(a, x) + math.exp(
                a * math.log(x) - x - math.lgamma(a + 1.0)
            )
            assert lhs == pytest.approx(rhs, abs=1e-10)


@given(st.floats(min_value=0.05, max_value=50.0), st.integers(min_value=1, max_value=20))
@settings(max_examples=200, deadline=None)
def test_chi2_sf_in_unit_interval_and_monotone(x, df):
    p = stats.chi2_sf(x, df)
    assert 0.0 <= p <= 1.0
    assert stats.chi2_sf(x + 1.0, df) <= p + 1e-12


# ---------------------------------------------------------------------------
# Mann-Whitney U
# ---------------------------------------------------------------------------

def test_mann_whitney_complete_separation():
    result = stats.mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert result.statistic == 0.0


def test_mann_whitney_identical_multisets():
    result = stats.mann_whitney_u([5, 5, 5], [5, 5, 5])
    assert result.statistic == pytest.approx(4.5)
    assert result.p_value == pytest.approx(1.0)


def test_mann_whitney_symmetric_in_arguments():
    a = [3.0, 1.0, 4.0, 1.0, 5.0]
    b = [9.0, 2.0, 6.0]
    r1 = stats.mann_whitney_u(a, b)
    r2 = stats.mann_whitney_u(b, a)
    assert r1.statistic == pytest.approx(r2.statistic)
    assert r1.p_value == pytest.approx(r2.p_value)


def test_mann_whitney_rejects_empty():
    with pytest.raises(ValueError):
        stats.mann_whitney_u([], [1.0])
    with pytest.raises(ValueError):
        stats.mann_whitney_u([1.0], [])


def test_mann_whitney_exact_matches_brute_force_200_instances():
    rng = random.Random(20260810)
    checked = 0
    while checked < 200:
        n_a = rng.randint(1, 9)
        n_b = rng.randint(1, 10 - n_a) if n_a < 10 else 1
        if n_a + n_b > 10:
            continue
        # small value range to force ties regularly
        a = [float(rng.randint(0, 6)) for _ in range(n_a)]
        b = [float(rng.randint(0, 6)) for _ in range(n_b)]
        u_oracle, p_oracle = brute_force_min_u_p(a, b)
        result = stats.mann_whitney_u(a, b)
        assert result.method == "mann-whitney-exact"
        assert result.statistic == pytest.approx(u_oracle, abs=1e-9)
        assert result.p_value == pytest.approx(p_oracle, abs=1e-9)
        checked += 1


def test_mann_whitney_normal_branch_large_separated_samples():
    a = [float(i) for i in range(30)]
    b = [float(i) + 40.0 for i in range(30)]
    result = stats.mann_whitney_u(a, b)
    assert result.method == "mann-whitney-normal"
    assert result.statistic == 0.0
    assert result.p_value < 0.001
    assert result.effect_size == pytest.approx(1.0)


def test_mann_whitney_normal_branch_all_tied():
    result = stats.mann_whitney_u([2.0] * 10, [2.0] * 10)
    assert result.p_value == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Cohen's kappa
# ---------------------------------------------------------------------------

# Reconstructed two-rater confusion matrix: 324 items, 313 agreements,
# positive marginals 126 and 127.
RATER_CONFUSION = [[121, 5], [6, 192]]


def test_kappa_reconstructed_confusion():
    assert stats.cohens_kappa(RATER_CONFUSION) == pytest.approx(0.928, abs=0.005)
    assert stats.percent_agreement(RATER_CONFUSION) == pytest.approx(0.966, abs=0.001)


def test_kappa_perfect_agreement():
    assert stats.cohens_kappa([[10, 0], [0, 5]]) == pytest.approx(1.0)


def test_kappa_chance_level_agreement():
    # p_o == p_e: independent raters with matching marginals
    assert stats.cohens_kappa([[25, 25], [25, 25]]) == pytest.approx(0.0, abs=1e-12)


def test_kappa_degenerate_marginals():
    with pytest.raises(stats.DegenerateMarginalsError):
        stats.cohens_kappa([[324, 0], [0, 0]])


def test_kappa_matches_vector_oracle_500_random_matrices():
    rng = random.Random(99)
    checked = 0
    while checked < 500:
        m = [[rng.randint(0, 40) for _ in range(2)] for _ in range(2)]
        if sum(map(sum, m)) == 0:
            continue
        try:
            got = stats.cohens_kappa(m)
        except stats.DegenerateMarginalsError:
            continue
        assert got == pytest.approx(kappa_from_vectors(m), abs=1e-12)
        checked += 1


@given(
    st.lists(st.integers(min_value=0, max_value=50), min_size=4, max_size=4).filter(
        lambda cells: sum(cells) > 0
    )
)
@settings(max_examples=200, deadline=None)
def test_kappa_property_vs_oracle(cells):
    m = [[cells[0], cells[1]], [cells[2], cells[3]]]
    try:
        got = stats.cohens_kappa(m)
    except stats.DegenerateMarginalsError:
        return
    assert got == pytest.approx(kappa_from_vectors(m), abs=1e-12)
