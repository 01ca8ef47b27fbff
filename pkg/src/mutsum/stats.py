"""Self-contained hypothesis tests and agreement coefficients.

Everything in this module is pure stdlib on purpose: the campaign report
asserts specific published-style numbers, and those must not drift with
the quirks of an external statistics package.  Conventions are pinned:

* chi-square: Pearson statistic without continuity correction; the
  survival function comes from the regularized incomplete gamma
  function (series + continued fraction).
* Mann-Whitney U: midranks for ties, U = min(U_a, U_b), two-sided;
  exact p by enumeration of label assignments for small samples
  (n_a + n_b <= EXACT_LIMIT), otherwise a normal approximation with
  tie and continuity corrections.
* Cohen's kappa: (p_o - p_e) / (1 - p_e) with marginal-product p_e.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

EXACT_LIMIT = 12

_EPS = 1e-14
_MAX_ITER = 500


class DegenerateMarginalsError(ValueError):
    """Kappa is undefined: expected agreement equals 1."""


@dataclass(frozen=True)
class StatResult:
    """Outcome of one hypothesis test."""

    statistic: float
    p_value: float
    degrees_of_freedom: int | None = None
    effect_size: float | None = None
    method: str = ""


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def _gamma_p_series(a: float, x: float) -> float:
    """Lower regularized gamma P(a, x) by power series; valid for x < a + 1."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    """Upper regularized gamma Q(a, x) by continued fraction (modified Lentz)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a)."""
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def chi2_sf(x: float, df: int) -> float:
    """Survival function of the chi-square distribution with df degrees."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if x <= 0.0:
        return 1.0
    return regularized_gamma_q(df / 2.0, x / 2.0)


def normal_sf(z: float) -> float:
    """Survival function of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Contingency tables
# ---------------------------------------------------------------------------

def _validate_table(table: list[list[int]]) -> tuple[list[int], list[int], int]:
    if len(table) < 2:
        raise ValueError("contingency table needs at least 2 rows")
    width = len(table[0])
    if width < 2 or any(len(row) != width for row in table):
        raise ValueError("contingency table rows must share a width of >= 2")
    for row in table:
        for cell in row:
            if cell < 0 or int(cell) != cell:
                raise ValueError(f"counts must be non-negative integers, got {cell!r}")
    row_totals = [sum(row) for row in table]
    col_totals = [sum(row[j] for row in table) for j in range(width)]
    if any(t == 0 for t in row_totals):
        raise ValueError("every row total must be > 0")
    if any(t == 0 for t in col_totals):
        raise ValueError("every column total must be > 0")
    return row_totals, col_totals, sum(row_totals)


def chi_square(table: list[list[int]]) -> StatResult:
    """Pearson chi-square test of independence, no continuity correction.

    Returns the statistic, (rows-1)*(cols-1) degrees of freedom, the
    survival-function p-value, and Cramer's V as the effect size.
    """
    row_totals, col_totals, n = _validate_table(table)
    statistic = 0.0
    for i, row in enumerate(table):
        for j, observed in enumerate(row):
            expected = row_totals[i] * col_totals[j] / n
            statistic += (observed - expected) ** 2 / expected
    df = (len(table) - 1) * (len(table[0]) - 1)
    k = min(len(table) - 1, len(table[0]) - 1)
    v = math.sqrt(statistic / (n * k))
    return StatResult(
        statistic=statistic,
        p_value=chi2_sf(statistic, df),
        degrees_of_freedom=df,
        effect_size=v,
        method="pearson-chi-square",
    )


def cramers_v(table: list[list[int]]) -> float:
    """Cramer's V effect size: sqrt(chi2 / (n * min(rows-1, cols-1)))."""
    result = chi_square(table)
    assert result.effect_size is not None
    return result.effect_size


# ---------------------------------------------------------------------------
# Mann-Whitney U
# ---------------------------------------------------------------------------

def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _tie_term(values: list[float]) -> float:
    total = 0.0
    for _, group in itertools.groupby(sorted(values)):
        t = len(list(group))
        total += t ** 3 - t
    return total


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> StatResult:
    """Two-sided Mann-Whitney U test under the min-U convention.

    Exact p-values (enumeration of all label assignments of the pooled
    sample) when n_a + n_b <= EXACT_LIMIT; larger samples use the
    normal approximation with tie correction and continuity correction.
    The effect size is the rank-biserial correlation 1 - 2U/(n_a*n_b).
    """
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a == 0 or n_b == 0:
        raise ValueError("both samples must be non-empty")
    pooled = [float(v) for v in sample_a] + [float(v) for v in sample_b]
    ranks = _midranks(pooled)
    r_a = sum(ranks[:n_a])
    u_a = n_a * n_b + n_a * (n_a + 1) / 2.0 - r_a
    u_b = n_a * n_b - u_a
    u = min(u_a, u_b)
    n = n_a + n_b

    if n <= EXACT_LIMIT:
        p = _exact_min_u_p(ranks, n_a, n_b, u)
        method = "mann-whitney-exact"
    else:
        mu = n_a * n_b / 2.0
        tie = _tie_term(pooled)
        var = n_a * n_b / 12.0 * ((n + 1) - tie / (n * (n - 1)))
        if var <= 0.0:
            # every pooled value tied: no evidence of any difference
            p = 1.0
        else:
            z = (mu - u - 0.5) / math.sqrt(var)
            z = max(z, 0.0)
            p = min(1.0, 2.0 * normal_sf(z))
        method = "mann-whitney-normal"

    effect = 1.0 - 2.0 * u / (n_a * n_b)
    return StatResult(statistic=u, p_value=p, effect_size=effect, method=method)


def _exact_min_u_p(ranks: list[float], n_a: int, n_b: int, observed_u: float) -> float:
    """P(min(U_a, U_b) <= observed) over all C(n, n_a) label assignments.

    Works from the pooled midranks, which depend only on the pooled
    multiset and are therefore identical across assignments.
    """
    n = n_a + n_b
    nm = n_a * n_b
    offset = n_a * (n_a + 1) / 2.0
    hits = 0
    total = 0
    for combo in itertools.combinations(range(n), n_a):
        r = sum(ranks[i] for i in combo)
        ua = nm + offset - r
        if min(ua, nm - ua) <= observed_u + 1e-9:
            hits += 1
        total += 1
    return hits / total


# ---------------------------------------------------------------------------
# Agreement
# ---------------------------------------------------------------------------

def percent_agreement(confusion: list[list[int]]) -> float:
    """Diagonal share of a square confusion matrix."""
    n = sum(sum(row) for row in confusion)
    if n == 0:
        raise ValueError("confusion matrix must contain at least one item")
    diag = sum(confusion[i][i] for i in range(len(confusion)))
    return diag / n


def cohens_kappa(confusion: list[list[int]]) -> float:
    """Chance-corrected agreement for a square rater-by-rater confusion matrix.

    Raises DegenerateMarginalsError when the expected agreement is 1
    (both raters constant on the same single label), where kappa is
    undefined.
    """
    size = len(confusion)
    if size < 2 or any(len(row) != size for row in confusion):
        raise ValueError("confusion matrix must be square with >= 2 labels")
    n = sum(sum(row) for row in confusion)
    if n == 0:
        raise ValueError("confusion matrix must contain at least one item")
    p_o = percent_agreement(confusion)
    row_marginals = [sum(row) / n for row in confusion]
    col_marginals = [sum(row[j] for row in confusion) / n for j in range(size)]
    p_e = sum(r * c for r, c in zip(row_marginals, col_marginals))
    if abs(1.0 - p_e) < 1e-12:
        raise DegenerateMarginalsError(
            f"expected agreement is 1 (marginals {row_marginals} / {col_marginals}); kappa undefined"
        )
    return (p_o - p_e) / (1.0 - p_e)
