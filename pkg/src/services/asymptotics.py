"""
Asymptotics Module
This module provides the large-size limits of two-point functions: exact average
numbers of edges and vertices at a given distance from the pointed vertex of an
infinitely large map, a coefficient-ratio estimator that recovers them from the
series, and a numerical check of the cross-ratio identity between the
characteristic roots of regular constellations.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import mpmath as mp

from src.conf.config import settings
from src.services.errors import CapacityError, MapError, SeriesError, VerificationError
from src.services.series import Series1
from src.services.twopoint import closed_form, get_family


logger = logging.getLogger(__name__)

CRITICAL_POINTS = {"GeneralMap": Fraction(1, 12), "BipartiteMap": Fraction(1, 8)}
MIN_ESTIMATOR_ORDER = 50
CPQ_TOLERANCE = mp.mpf("1e-30")


@dataclass(frozen=True)
class AsymptoticConstants:
    """
    Average numbers of edges and vertices around distance ``i`` in an infinitely large vertex-pointed map.

    Attributes:
        family (str): ``GeneralMap`` or ``BipartiteMap``.
        i (int): Distance index.
        e_up (Fraction): Edges of type ``(i - 1, i)``.
        e_level (Fraction | None): Edges of type ``(i, i)``; bipartite maps have none.
        e_down (Fraction): Edges of type ``(i + 1, i)``.
        v (Fraction | None): Vertices at distance ``i``, for ``i >= 1``.
    """

    family: str
    i: int
    e_up: Fraction
    e_level: Fraction | None
    e_down: Fraction
    v: Fraction | None

    def to_json(self) -> dict:
        values = {"e_up": self.e_up, "e_level": self.e_level, "e_down": self.e_down, "v": self.v}
        return {
            "family": self.family,
            "i": self.i,
            **{key: None if value is None else str(value) for key, value in values.items()},
        }


def _general_constants(i: int) -> tuple[Fraction, Fraction, Fraction, Fraction | None]:
    up = Fraction(
        i * (i + 3) * (2 * i + 3) * (5 * i**4 + 30 * i**3 + 67 * i**2 + 66 * i + 28),
        35 * (i + 1) ** 2 * (i + 2) ** 2,
    )
    level = Fraction(
        2
        * (
            5 * i**8 + 80 * i**7 + 537 * i**6 + 1964 * i**5 + 4251 * i**4
            + 5528 * i**3 + 4175 * i**2 + 1660 * i + 280
        ),
        35 * (i + 1) ** 2 * (i + 2) * (i + 3) ** 2,
    )
    down = Fraction(
        (i + 1) * (i + 4) * (2 * i + 5) * (5 * i**4 + 50 * i**3 + 187 * i**2 + 310 * i + 196),
        35 * (i + 2) ** 2 * (i + 3) ** 2,
    )
    v = Fraction(3, 280) * (2 * i + 3) * (10 * i**2 + 30 * i + 9) if i >= 1 else None
    return up, level, down, v


def _bipartite_constants(i: int) -> tuple[Fraction, None, Fraction, Fraction | None]:
    up = Fraction(
        2 * i * (i + 4) * (10 * i**4 + 80 * i**3 + 233 * i**2 + 292 * i + 141),
        105 * (i + 1) * (i + 2) * (i + 3),
    )
    down = Fraction(
        2 * (i + 1) * (i + 5) * (10 * i**4 + 120 * i**3 + 533 * i**2 + 1038 * i + 756),
        105 * (i + 2) * (i + 3) * (i + 4),
    )
    v = Fraction(4, 315) * (i + 2) * (10 * i**2 + 40 * i + 13) if i >= 1 else None
    return up, None, down, v


def asymptotic_constants(family: str, i: int) -> AsymptoticConstants:
    """
    Exact large-size averages at distance ``i``.

    Args:
        family (str): General or bipartite maps (tag or alias).
        i (int): Distance index, ``i >= 0``.

    Returns:
        AsymptoticConstants: The rational constants.
    """
    name = get_family(family).name
    if name not in CRITICAL_POINTS:
        raise MapError(f"no asymptotic constants for {name}")
    if i < 0:
        raise MapError("distance index must be nonnegative")
    values = _general_constants(i) if name == "GeneralMap" else _bipartite_constants(i)
    return AsymptoticConstants(name, i, *values)


@dataclass(frozen=True)
class Estimate:
    """
    A limit extracted from series coefficients.

    Attributes:
        family (str): Family tag.
        i (int): Distance index.
        observable (str): ``R`` for ``e_up``, ``S2`` for ``e_level``, ``V`` for ``v``.
        n_max (int): Largest coefficient used.
        terms (int): Richardson order.
        value (mp.mpf): The estimate.
        exact (Fraction | None): The exact constant it should approach.
    """

    family: str
    i: int
    observable: str
    n_max: int
    terms: int
    value: mp.mpf
    exact: Fraction | None

    @property
    def relative_error(self) -> mp.mpf | None:
        if not self.exact:
            return None
        target = mp.mpf(self.exact.numerator) / self.exact.denominator
        return abs(self.value - target) / abs(target)

    def to_json(self, as_float: bool = False) -> dict:
        error = self.relative_error
        return {
            "family": self.family,
            "i": self.i,
            "observable": self.observable,
            "n_max": self.n_max,
            "terms": self.terms,
            "estimate": float(self.value) if as_float else mp.nstr(self.value, 30),
            "exact": None if self.exact is None else str(self.exact),
            "relative_error": None if error is None else mp.nstr(error, 6),
        }


def _mpf(value: Fraction) -> mp.mpf:
    return mp.mpf(value.numerator) / value.denominator


def richardson(values: list, n: int) -> mp.mpf:
    """
    Richardson extrapolation of ``A(n), ..., A(n + N)`` assuming an expansion in powers of ``1/n``.

    Args:
        values (list): The ``N + 1`` consecutive terms starting at index ``n``.
        n (int): Index of the first term.
    """
    N = len(values) - 1
    total = mp.mpf(0)
    for j, a in enumerate(values):
        total += a * mp.mpf(n + j) ** N * (-1) ** (j + N) / (mp.factorial(j) * mp.factorial(N - j))
    return total


def _difference(family: str, i: int, observable: str, n_max: int) -> Series1:
    if i < (0 if observable == "S2" else 1):
        raise MapError(f"{observable}_{i} is not defined")
    current = closed_form(family, max(i, 1), n_max).observables[observable]
    below = current.get(i - 1)
    if below is None:
        # R_0 = 1 and V_0 = 0 carry no singular part
        return current[i]
    return current[i] - below


def estimate_asymptotics(
    family: str, i: int, n_max: int, observable: str = "R", terms: int = 12
) -> Estimate:
    """
    Estimate a large-size average from the coefficients of a two-point function.

    The ratio ``[t^n](X_i - X_(i-1)) / [t^n](1 - t/t_c)^(3/2)`` tends to the
    difference of singular amplitudes; Richardson extrapolation in ``1/n``
    removes the corrections and ``3/2`` times the limit is the average.

    Args:
        family (str): General or bipartite maps.
        i (int): Distance index.
        n_max (int): Largest coefficient to compute, at least 50.
        observable (str): ``R``, ``S2`` (general maps) or ``V``.
        terms (int): Richardson order.

    Returns:
        Estimate: The extrapolated value next to the exact constant.
    """
    fam = get_family(family)
    name = fam.name
    if name not in CRITICAL_POINTS:
        raise MapError(f"no critical point known for {name}")
    if n_max < MIN_ESTIMATOR_ORDER:
        raise CapacityError(f"the estimator needs n_max >= {MIN_ESTIMATOR_ORDER}, got {n_max}")
    if not 1 <= terms < n_max // 2:
        raise CapacityError(f"Richardson order {terms} out of range for n_max={n_max}")
    if observable not in fam.observables:
        raise MapError(f"{name} has no observable {observable!r}")
    exact_values = asymptotic_constants(name, i)
    exact = {"R": exact_values.e_up, "S2": exact_values.e_level, "V": exact_values.v}[observable]

    diff = _difference(name, i, observable, n_max)
    t_c = _mpf(CRITICAL_POINTS[name])
    start = n_max - terms
    with mp.workdps(settings.MP_DPS):
        ratios = []
        for n in range(start, n_max + 1):
            singular = mp.binomial(mp.mpf(3) / 2, n) * (-1) ** n / t_c**n
            ratios.append(_mpf(diff.coefficient(n)) / singular)
        value = mp.mpf(3) / 2 * richardson(ratios, start)
    estimate = Estimate(name, i, observable, n_max, terms, value, exact)
    logger.info("%s %s_%d estimate at n=%d: %s", name, observable, i, n_max, mp.nstr(value, 12))
    return estimate


@dataclass(frozen=True)
class CpqReport:
    """
    Outcome of the cross-ratio check for ``(p + 1)``-regular constellations.

    Attributes:
        p (int): Degree parameter.
        t (Fraction): Sample point of the weight.
        roots (tuple[mp.mpc, ...]): The ``p - 1`` characteristic roots inside the unit disk.
        max_deviation (mp.mpf): Largest difference between the two cross ratios.
        max_reduction (mp.mpf): Largest value of the reduced polynomial identity.
    """

    p: int
    t: Fraction
    roots: tuple
    max_deviation: mp.mpf
    max_reduction: mp.mpf

    @property
    def ok(self) -> bool:
        return self.max_deviation <= CPQ_TOLERANCE and self.max_reduction <= CPQ_TOLERANCE

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "t": str(self.t),
            "roots": [mp.nstr(r, 20) for r in self.roots],
            "max_deviation": mp.nstr(self.max_deviation, 6),
            "max_reduction": mp.nstr(self.max_reduction, 6),
            "ok": self.ok,
        }


def _tree_value(p: int, t: mp.mpf) -> mp.mpf:
    """The smallest positive solution of ``T = 1 + p t T^p``."""
    T = mp.mpf(1)
    for _ in range(200):
        T = 1 + p * t * T**p
    return mp.findroot(lambda x: 1 + p * t * x**p - x, T)


def _power_sum(y, degree: int):
    return mp.fsum(y**k for k in range(1, degree + 1))


def _cross_ratio(a, b, degree: int):
    pa, pb = _power_sum(a, degree), _power_sum(b, degree)
    qa, qb = _power_sum(1 / a, degree), _power_sum(1 / b, degree)
    return (pa - pb) * (qa - qb) / ((pa - qb) * (qa - pb))


def characteristic_H(p: int, y):
    """``H(y) = sum_{k=1}^{p-1} (p - k)(y^k + y^(-k))``."""
    return mp.fsum((p - k) * (y**k + y ** (-k)) for k in range(1, p))


def cpq_identity_check(p: int, t_sample) -> CpqReport:
    """
    Compare the cross ratios built on ``y + ... + y^(p-1)`` and ``y + ... + y^p``.

    For every pair of characteristic roots of ``(p + 1)``-regular constellations,
    the two cross ratios agree, and the polynomial identity reducing one to the
    other vanishes because ``H`` takes the same value on both roots.

    Args:
        p (int): Degree parameter, ``2 <= p <= 6``.
        t_sample: Rational weight strictly between 0 and the critical point.

    Returns:
        CpqReport: Roots and deviations at ``settings.MP_DPS`` digits.
    """
    if not 2 <= p <= 6:
        raise CapacityError(f"cpq check supports 2 <= p <= 6, got {p}")
    t_value = Fraction(t_sample)
    t_c = Fraction((p - 1) ** (p - 1), p ** (p + 1))
    if not 0 < t_value < t_c:
        raise SeriesError(f"t = {t_value} is outside (0, {t_c})")
    with mp.workdps(settings.MP_DPS + 10):
        t = _mpf(t_value)
        T = _tree_value(p, t)
        c = 1 / (t * T**p)
        # y^(p-1) (H(y) - c), highest degree first
        coefficients = []
        for degree in range(2 * (p - 1), -1, -1):
            k = abs(degree - (p - 1))
            coefficients.append(-c if k == 0 else mp.mpf(p - k))
        try:
            roots = mp.polyroots(coefficients, maxsteps=400, extraprec=2 * settings.MP_DPS)
        except mp.libmp.NoConvergence as error:
            raise VerificationError("cpq-roots", {"p": p, "t": str(t_value)}) from error
        inside = [r for r in roots if abs(r) < 1]
        if len(inside) != p - 1:
            raise VerificationError(
                "cpq-roots",
                {"p": p, "t": str(t_value), "inside": len(inside), "expected": p - 1},
            )
        deviation, reduction = mp.mpf(0), mp.mpf(0)
        for a, b in combinations(inside, 2):
            lhs = _cross_ratio(a, b, p)
            rhs = _cross_ratio(a, b, p - 1)
            deviation = max(deviation, abs(lhs - rhs) / max(1, abs(lhs)))
            pa, pb = _power_sum(a, p - 1), _power_sum(b, p - 1)
            pa1, pb1 = _power_sum(a, p), _power_sum(b, p)
            display = (b**p * pa - pb) * (pa1 - pb1) - (b ** (p + 1) * pa1 - pb1) * (pa - pb)
            reduced = (a * b) ** p * (1 - b) * (characteristic_H(p, a) - characteristic_H(p, b))
            reduction = max(reduction, abs(display), abs(reduced))
    report = CpqReport(p, t_value, tuple(inside), deviation, reduction)
    logger.info("cpq p=%d t=%s: deviation %s", p, t_value, mp.nstr(deviation, 4))
    return report
