"""Mann-Whitney U rank test for two independent samples.

U counts, over all pairs, how often a value from the first sample exceeds one
from the second (ties count half). Small tie-free samples get the exact null
distribution, computed by the count recurrence

    f(n, m, u) = f(n-1, m, u-m) + f(n, m-1, u)

(the largest pooled value is either from the first sample, beating all m of
the second, or from the second, beating none). Larger or tied samples fall
back to the normal approximation with tie-corrected variance and a 0.5
continuity correction.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

EXACT_LIMIT = 16  # max n+m for the exact method

_ALTERNATIVES = ("two-sided", "greater", "less")


@dataclass(frozen=True)
class UTestResult:
    u_statistic: float
    p_value: float
    method: str
    n: int
    m: int
    degenerate: bool = False


def mann_whitney_u(
    a: list[float],
    b: list[float],
    alternative: str = "two-sided",
    method: str = "auto",
) -> UTestResult:
    if alternative not in _ALTERNATIVES:
        raise ValueError(f"alternative must be one of {list(_ALTERNATIVES)}, got {alternative!r}")
    if method not in ("auto", "exact", "normal"):
        raise ValueError(f"method must be 'auto', 'exact', or 'normal', got {method!r}")
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return UTestResult(u_statistic=0.0, p_value=1.0, method="degenerate", n=n, m=m, degenerate=True)

    u_stat = 0.0
    for x in a:
        for y in b:
            if x > y:
                u_stat += 1.0
            elif x == y:
                u_stat += 0.5

    pooled = sorted(list(a) + list(b))
    has_ties = any(pooled[i] == pooled[i + 1] for i in range(len(pooled) - 1))
    if len(set(pooled)) == 1:
        return UTestResult(u_statistic=u_stat, p_value=1.0, method="degenerate", n=n, m=m, degenerate=True)

    if method == "exact" and has_ties:
        raise ValueError("exact method requires tie-free samples")
    if method == "auto":
        method = "exact" if not has_ties and n + m <= EXACT_LIMIT else "normal"

    if method == "exact":
        p = _exact_p(int(u_stat), n, m, alternative)
    else:
        p = _normal_p(u_stat, n, m, pooled, alternative)
    return UTestResult(u_statistic=u_stat, p_value=p, method=method, n=n, m=m)


def _u_distribution(n: int, m: int) -> list[int]:
    """Count of arrangements with each U value under the null, exact ints."""
    maxu = n * m
    f = [[0] * (maxu + 1) for _ in range(m + 1)]
    for j in range(m + 1):
        f[j][0] = 1
    for _i in range(1, n + 1):
        g = [[0] * (maxu + 1) for _ in range(m + 1)]
        g[0][0] = 1
        for j in range(1, m + 1):
            row = g[j]
            prev_i = f[j]
            prev_j = g[j - 1]
            for u in range(maxu + 1):
                row[u] = (prev_i[u - j] if u >= j else 0) + prev_j[u]
        f = g
    return f[m]


def _exact_p(u_obs: int, n: int, m: int, alternative: str) -> float:
    dist = _u_distribution(n, m)
    total = math.comb(n + m, n)
    if alternative == "two-sided":
        center2 = n * m  # 2 * (n*m/2), kept integral
        obs_dev = abs(2 * u_obs - center2)
        count = sum(c for u, c in enumerate(dist) if abs(2 * u - center2) >= obs_dev)
    elif alternative == "greater":
        count = sum(dist[u_obs:])
    else:
        count = sum(dist[: u_obs + 1])
    return count / total


def _normal_p(u_stat: float, n: int, m: int, pooled: list[float], alternative: str) -> float:
    big_n = n + m
    mu = n * m / 2.0
    tie_term = sum(t**3 - t for t in Counter(pooled).values())
    var = n * m / 12.0 * ((big_n + 1) - tie_term / (big_n * (big_n - 1)))
    if var <= 0:
        return 1.0
    sd = math.sqrt(var)
    if alternative == "two-sided":
        z = max(abs(u_stat - mu) - 0.5, 0.0) / sd
        return min(1.0, math.erfc(z / math.sqrt(2)))
    if alternative == "greater":
        z = (u_stat - mu - 0.5) / sd
        return 0.5 * math.erfc(z / math.sqrt(2))
    z = (u_stat - mu + 0.5) / sd
    return 0.5 * math.erfc(-z / math.sqrt(2))
