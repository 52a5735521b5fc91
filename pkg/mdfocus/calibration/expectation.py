"""
Expected number of faces and vertices of the convex hull of a random walk
P(0) = 0, P(1), ..., P(n-1) in R^{p+1} with i.i.d. continuous increments.

Both are sums of ratios [n m] / (n-1)! of unsigned Stirling numbers of the first kind, which
are elementary symmetric polynomials of 1, 1/2, ..., 1/(n-1) and so depend on n only through
the harmonic partial sums sigma_k = sum_{i<n} i^-k.

Two evaluations of the ratios are provided: explicit harmonic formulas (m <= 6) and the
omega recursion. With exact=True everything is a Fraction; otherwise sigma_k is evaluated
in extended precision with mpmath and results are returned as float.
"""

# Standard Library
import math
from fractions import Fraction
from typing import Tuple

# Third Party
import mpmath

# First Party
from mdfocus.exceptions import ConfigError, InputError

MAX_STIRLING_ORDER = 6
MAX_DIMENSION = MAX_STIRLING_ORDER - 1
EXTENDED_DPS = 40


class HarmonicTable:
    """sigma_1, ..., sigma_K for one n, as Fractions (exact) or mpmath numbers."""

    def __init__(self, n: int, order: int = MAX_STIRLING_ORDER, exact: bool = False):
        if n < 2:
            raise InputError(f"harmonic sums need n >= 2, got {n}")
        self.n = n
        self.order = order
        self.exact = exact
        if exact:
            self.sigma = self._exact_sums(n, order)
        else:
            with mpmath.workdps(EXTENDED_DPS):
                self.sigma = [mpmath.harmonic(n - 1)] + [
                    mpmath.zeta(k) - mpmath.zeta(k, n) for k in range(2, order + 1)
                ]

    @staticmethod
    def _exact_sums(n, order):
        sums = [Fraction(0)] * order
        for i in range(1, n):
            term = Fraction(1, i)
            power = term
            for k in range(order):
                sums[k] += power
                power *= term
        return sums

    def __getitem__(self, k: int):
        """sigma_k for 1 <= k <= order."""
        return self.sigma[k - 1]

    def __repr__(self):
        return f"<class HarmonicTable: n={self.n}, order={self.order}, exact={self.exact}>"


def _check_order(m):
    if m < 0 or m > MAX_STIRLING_ORDER:
        raise ConfigError(f"Stirling order m={m} must lie in [0, {MAX_STIRLING_ORDER}]")


def _zero_order(n, exact):
    if exact:
        return Fraction(1, math.factorial(n - 1))
    return math.exp(-math.lgamma(n))


def _finish(value, exact):
    return Fraction(value) if exact else float(value)


def _harmonic_formula(s1, s2, s3, s4, s5, m):
    if m == 1:
        return 1
    if m == 2:
        return s1
    if m == 3:
        return (s1 ** 2 - s2) / 2
    if m == 4:
        return s1 ** 3 / 6 - s1 * s2 / 2 + s3 / 3
    if m == 5:
        return s1 ** 4 / 24 - s1 ** 2 * s2 / 4 + s1 * s3 / 3 + s2 ** 2 / 8 - s4 / 4
    return (
        s1 ** 5 / 120
        - s1 ** 3 * s2 / 12
        + s1 ** 2 * s3 / 6
        + s1 * s2 ** 2 / 8
        - s1 * s4 / 4
        - s2 * s3 / 6
        + s5 / 5
    )


def stirling_ratio(n: int, m: int, exact: bool = False, table: HarmonicTable = None):
    """[n m] / (n-1)! from the explicit harmonic formulas; [n 0] is taken as 1."""
    _check_order(m)
    if m == 0:
        return _zero_order(n, exact)
    if table is None:
        table = HarmonicTable(n, exact=exact)
    with mpmath.workdps(EXTENDED_DPS):
        value = _harmonic_formula(*(table[k] for k in range(1, 6)), m)
    return _finish(value, exact)


def pochhammer(x: int, k: int) -> int:
    """Rising factorial (x)_k over the integers."""
    out = 1
    for i in range(k):
        out *= x + i
    return out


def omega(table: HarmonicTable, m: int):
    """omega(n, m) = 1{m=0} + sum_{k<m} (1-m)_k sigma_{k+1} omega(n, m-1-k)."""
    values = [1]
    with mpmath.workdps(EXTENDED_DPS):
        for j in range(1, m + 1):
            values.append(
                sum(pochhammer(1 - j, k) * table[k + 1] * values[j - 1 - k] for k in range(j))
            )
    return values[m]


def stirling_ratio_recursive(n: int, m: int, exact: bool = False, table: HarmonicTable = None):
    """[n m] / (n-1)! = omega(n, m-1) / (m-1)!."""
    _check_order(m)
    if m == 0:
        return _zero_order(n, exact)
    if table is None:
        table = HarmonicTable(n, exact=exact)
    value = omega(table, m - 1)
    if exact:
        return Fraction(value) / math.factorial(m - 1)
    with mpmath.workdps(EXTENDED_DPS):
        return float(value / math.factorial(m - 1))


def expected_counts(n: int, p: int, include_zero_order: bool = False) -> Tuple[float, float]:
    """(expected faces, expected vertices) of the hull of P(0), ..., P(n-1) in R^{p+1}.

    The vertex sum runs over orders p+1, p-1, ... >= 1; include_zero_order also adds the order-0
    term with the [n 0] = 1 convention, which only contributes 2 / (n-1)!.
    """
    if not 1 <= p <= MAX_DIMENSION:
        raise ConfigError(f"expected hull sizes are available for 1 <= p <= {MAX_DIMENSION}")
    if n < 2:
        raise InputError(f"expected hull sizes need n >= 2, got {n}")
    table = HarmonicTable(n)
    faces = 2 * math.factorial(p) * stirling_ratio(n, p + 1, table=table)
    vertices = 0.0
    for m in range(p + 1, -1, -2):
        if m == 0 and not include_zero_order:
            continue
        vertices += 2 * stirling_ratio(n, m, table=table)
    return faces, vertices
