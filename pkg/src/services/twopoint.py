"""
Two-Point Module
This module computes distance-dependent two-point functions of planar maps and
hypermaps from two independent sources: the recursive decomposition of floating
mobiles, solved order by order on a padded label window, and the explicit closed
forms in the parameter ``y`` (``y1, y2`` on the half grid for the 3-families,
``y, alpha`` for the two-parameter families).

Table rows ``T_i`` (and ``U_i``) are generating functions of floating mobiles
planted at a white vertex labelled ``i``; the observables built from them are

* ``R_i``: pointed rooted objects whose root edge has type ``(j - 1, j)``, ``j <= i``;
* ``S2_i``: pointed rooted maps whose root edge has type ``(j, j)``, ``j <= i``;
* ``calR_i``: pointed general hypermaps with a marked edge of type ``(j - 1, j)``;
* ``V_i``: vertex-pointed objects with a second marked vertex at distance at most ``i``;
* ``triple``: 3-hypermaps and 3-constellations by the ccw-type of their root face.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import comb
from typing import Callable, Iterable

from src.conf.config import settings
from src.services.errors import CapacityError, MapError, SeriesError
from src.services.series import (
    Parametrization,
    Series1,
    Series2,
    cycle_sum,
    exp_series,
    invert_2param,
    log_series,
    newton_solve,
    sqrt_series,
)


logger = logging.getLogger(__name__)

AnySeries = Series1 | Series2
Index = int | tuple[int, int, int]

PROVENANCES = ("recurrence", "closed_form")


@dataclass(frozen=True)
class Family:
    """
    A family of maps or hypermaps with a two-point function.

    Attributes:
        name (str): Family tag.
        reach (int): Largest label jump across one black vertex of its mobiles.
        grid_step (int): 2 when the closed form lives on the half grid ``u = t^(1/2)``.
        two_parameter (bool): Whether a face weight ``z`` is carried.
        observables (tuple[str, ...]): Observables assembled from the rows.
        tree (tuple[int, int] | None): ``(c, p)`` for the tree equation ``T = 1 + c t T^p``.
        base (str | None): One-parameter family obtained at ``z = 1``.
    """

    name: str
    reach: int
    grid_step: int
    two_parameter: bool
    observables: tuple[str, ...]
    tree: tuple[int, int] | None = None
    base: str | None = None


FAMILIES = {
    f.name: f
    for f in (
        Family("GeneralMap", 1, 1, False, ("R", "S2", "V"), tree=(3, 2)),
        Family("BipartiteMap", 1, 1, False, ("R", "V"), tree=(2, 2)),
        Family("GeneralHypermap", 1, 1, False, ("calR",), tree=(2, 2)),
        Family("ThreeHypermap", 2, 2, False, ("R", "V", "triple"), tree=(10, 3)),
        Family("ThreeConstellation", 2, 2, False, ("R", "V", "triple"), tree=(3, 3)),
        Family("GeneralMap2Par", 1, 1, True, ("R", "S2"), base="GeneralMap"),
        Family("BipartiteMap2Par", 1, 1, True, ("R",), base="BipartiteMap"),
        Family("GeneralHypermap2Par", 1, 1, True, ("calR",), base="GeneralHypermap"),
    )
}
ALIASES = {
    "general": "GeneralMap",
    "bipartite": "BipartiteMap",
    "hypermap": "GeneralHypermap",
    "3-hypermap": "ThreeHypermap",
    "3-constellation": "ThreeConstellation",
    "general-2par": "GeneralMap2Par",
    "bipartite-2par": "BipartiteMap2Par",
    "hypermap-2par": "GeneralHypermap2Par",
}

# ccw-types of a root face, relative to its first entry
HYPERMAP_SHAPES = (
    (0, -1, -2), (0, -1, -1), (0, -1, 0), (0, -1, 1), (0, 0, -1),
    (0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 2, 1),
)
CONSTELLATION_SHAPES = ((0, -1, -2), (0, -1, 1), (0, 2, 1))


def get_family(name: str) -> Family:
    family = FAMILIES.get(name) or FAMILIES.get(ALIASES.get(name.lower(), ""))
    if family is None:
        raise MapError(f"unknown family {name!r}")
    return family


def admissible_triples(family: str, limit: int) -> list[tuple[int, int, int]]:
    """Admissible root-face types with every entry in ``0..limit``."""
    name = get_family(family).name
    if name == "ThreeHypermap":
        shapes = HYPERMAP_SHAPES
    elif name == "ThreeConstellation":
        shapes = CONSTELLATION_SHAPES
    else:
        raise MapError(f"{name} has no root-face types")
    out = set()
    for j in range(limit + 1):
        for shape in shapes:
            triple = tuple(j + s for s in shape)
            if all(0 <= x <= limit for x in triple):
                out.add(triple)
    return sorted(out)


@dataclass(frozen=True)
class _Ring:
    """Constructors of the coefficient ring: exact in ``z``, or at a fixed face weight."""

    symbolic: bool
    weight: Fraction = Fraction(1)

    @property
    def z_value(self) -> Fraction | None:
        return None if self.symbolic else self.weight

    def constant(self, value, order: int) -> AnySeries:
        return Series2.constant(value, order) if self.symbolic else Series1.constant(value, order)

    def t(self, order: int) -> AnySeries:
        return Series2.t(order) if self.symbolic else Series1.variable(order)

    def z(self, order: int) -> AnySeries:
        return Series2.z(order) if self.symbolic else Series1.constant(self.weight, order)


def _ring(family: Family, z) -> _Ring:
    if not family.two_parameter:
        if z is not None:
            raise SeriesError(f"{family.name} carries no face weight")
        return _Ring(False)
    if z is None:
        return _Ring(True)
    return _Ring(False, Fraction(z))


def _check_request(i_max: int, order: int | None) -> int:
    order = settings.DEFAULT_ORDER if order is None else order
    if i_max < 1 or order < 1:
        raise CapacityError("two-point tables need i_max >= 1 and order >= 1")
    if order > settings.MAX_SERIES_ORDER:
        raise CapacityError(f"order {order} exceeds MAX_SERIES_ORDER={settings.MAX_SERIES_ORDER}")
    return order


def _one_like(s: AnySeries) -> AnySeries:
    if isinstance(s, Series2):
        return Series2.constant(1, s.order)
    return Series1.constant(1, s.order, s.step)


def _t_like(s: AnySeries) -> AnySeries:
    if isinstance(s, Series2):
        return Series2.t(s.order)
    return Series1.variable(s.order // s.step, s.step)


def _first_order(s: AnySeries) -> str | None:
    """Exponent of the first nonzero coefficient, ``None`` for a vanishing series."""
    if s.is_zero():
        return None
    if isinstance(s, Series2):
        return str(next(n for n, p in enumerate(s.coeffs) if p))
    return str(s.terms()[0][0])


def _key(name: str, index: Index | None) -> str:
    if index is None:
        return name
    if isinstance(index, tuple):
        return f"{name}_{','.join(map(str, index))}"
    return f"{name}_{index}"


@dataclass
class TwoPointTable:
    """
    Two-point functions of one family, truncated in ``t``.

    Attributes:
        family (str): Family tag.
        i_max (int): Largest distance index of the observables.
        order (int): Truncation order in ``t``.
        provenance (str): ``recurrence`` or ``closed_form``.
        z (Fraction | None): Face weight, ``None`` when kept as a variable.
        rows (dict[str, dict[int, AnySeries]]): ``T_i`` (and ``U_i``) for ``0 <= i <= i_max + 3``.
        observables (dict[str, dict[Index, AnySeries]]): Assembled observables.
        bulk (dict[str, AnySeries]): The ``i -> infinity`` limits ``T, U, R, S2, calR``.
        parameters (dict[str, AnySeries]): ``y``, ``alpha``, ``y1``, ``y2`` of a closed form.
    """

    family: str
    i_max: int
    order: int
    provenance: str
    z: Fraction | None = None
    rows: dict[str, dict[int, AnySeries]] = field(default_factory=dict)
    observables: dict[str, dict[Index, AnySeries]] = field(default_factory=dict)
    bulk: dict[str, AnySeries] = field(default_factory=dict)
    parameters: dict[str, AnySeries] = field(default_factory=dict)

    def series(self, name: str, index: Index | None = None) -> AnySeries:
        if index is None:
            found = self.bulk.get(name, self.parameters.get(name))
        else:
            found = self.rows.get(name, self.observables.get(name, {})).get(index)
        if found is None:
            raise SeriesError(f"{self.family} table has no {_key(name, index)}")
        return found

    def triple(self, triple: tuple[int, int, int]) -> AnySeries:
        """The generating function of root faces of ccw-type ``triple - m``, ``m >= 0``."""
        allowed = admissible_triples(self.family, max(triple))
        if tuple(triple) not in allowed:
            raise MapError(f"{triple} is not an admissible root-face type of {self.family}")
        return self.series("triple", tuple(triple))

    def entries(self) -> dict[str, AnySeries]:
        out = {}
        for source in (self.rows, self.observables):
            for name, values in source.items():
                for index, s in values.items():
                    out[_key(name, index)] = s
        out.update(self.bulk)
        return out

    def mismatches(self, other: TwoPointTable) -> list[str]:
        """Keys present in both tables whose series disagree to the common order."""
        mine, theirs = self.entries(), other.entries()
        bad = []
        for key in sorted(set(mine) & set(theirs)):
            a, b = mine[key], theirs[key]
            if type(a) is not type(b) or not a.agrees_with(b):
                bad.append(key)
        return bad

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "provenance": self.provenance,
            "i_max": self.i_max,
            "order": self.order,
            "z": None if self.z is None else str(self.z),
            "series": {key: s.to_json() for key, s in sorted(self.entries().items())},
            "parameters": {key: s.to_json() for key, s in sorted(self.parameters.items())},
        }

    def to_csv(self, name: str, index: Index | None = None) -> str:
        return self.series(name, index).to_csv()


# recursive decomposition


def _decomposition(name: str, T: Callable[[int], AnySeries], i: int) -> tuple[AnySeries, AnySeries]:
    """
    Weights of one black vertex hanging from a white vertex labelled ``i``.

    Returns:
        tuple: All configurations, and those keeping the white vertex a non right-local max.
    """
    if name == "GeneralMap":
        stay = T(i - 1) + T(i)
        return stay + T(i + 1), stay
    if name in ("BipartiteMap", "GeneralHypermap"):
        return T(i - 1) + T(i + 1), T(i - 1)
    if name == "ThreeHypermap":
        stay = T(i - 2) * T(i - 1) + T(i - 1) * T(i - 1) + 2 * T(i - 1) * T(i) + T(i) * T(i) + T(i) * T(i + 1)
        up = T(i - 1) * T(i + 1) + T(i) * T(i + 1) + T(i + 1) * T(i + 1) + T(i + 1) * T(i + 2)
        return stay + up, stay
    if name == "ThreeConstellation":
        stay = T(i - 2) * T(i - 1)
        return stay + T(i - 1) * T(i + 1) + T(i + 1) * T(i + 2), stay
    raise MapError(f"{name} has no one-parameter decomposition")


def _recurrence_step(family: Family, T, U, i: int, t: AnySeries, z: AnySeries):
    if not family.two_parameter:
        full, _ = _decomposition(family.name, T, i)
        return (1 - t * full).inverse(), None
    if family.name == "GeneralMap2Par":
        new_t = z + t * (T(i) * U(i - 1) + T(i) * T(i) + U(i) * T(i + 1))
        new_u = 1 + t * (U(i) * U(i - 1) + U(i) * T(i) + U(i) * T(i + 1))
    else:
        new_t = z + t * (T(i) * U(i - 1) + U(i) * T(i + 1))
        new_u = 1 + t * (U(i) * U(i - 1) + U(i) * T(i + 1))
    return new_t, new_u


def _tree(family: Family, ring: _Ring, order: int) -> tuple[AnySeries, AnySeries | None]:
    """The label-free solution ``T`` (and ``U``) of the decomposition."""
    if not family.two_parameter:
        c, p = family.tree
        coefficients = [1, -1] + [0] * (p - 2) + [Series1.monomial(c, 1, order)]
        return newton_solve(coefficients, Series1.constant(1, order)), None
    T, U = ring.z(0), ring.constant(1, 0)
    for k in range(1, order + 1):
        t, z = ring.t(k), ring.z(k)
        T, U = T.extend(k), U.extend(k)
        if family.name == "GeneralMap2Par":
            T, U = z + t * (T * T + 2 * T * U), 1 + t * (2 * T * U + U * U)
        else:
            T, U = z + 2 * t * T * U, 1 + t * U * (T + U)
    return T, U


def solve_recurrence(
    family: str, i_max: int, order: int | None = None, z=None, padding: int = 2
) -> TwoPointTable:
    """
    Solve the mobile decomposition order by order on a padded label window.

    The coefficient of ``t^k`` in ``T_i`` only involves rows within ``reach * k``
    of ``i``; the window shrinks by ``reach`` after every order so that rows up to
    ``i_max + 3 + padding`` are exact when the iteration stops.

    Args:
        family (str): Family tag or alias.
        i_max (int): Largest distance index of the observables.
        order (int | None): Truncation order in ``t``.
        z: Rational face weight of a two-parameter family; ``None`` keeps ``z`` symbolic.
        padding (int): Extra exact rows beyond those the observables need.

    Returns:
        TwoPointTable: Rows and observables with provenance ``recurrence``.
    """
    fam = get_family(family)
    order = _check_request(i_max, order)
    ring = _ring(fam, z)
    top = i_max + 3
    window = top + padding + fam.reach * order
    assert window - fam.reach * order >= top, "recurrence window too small"

    rows_t = {j: ring.z(0) for j in range(1, window + fam.reach + 1)}
    rows_u = {j: ring.constant(1, 0) for j in rows_t} if fam.two_parameter else None
    for k in range(1, order + 1):
        limit = top + padding + fam.reach * (order - k)
        t, zk, zero = ring.t(k), ring.z(k), ring.constant(0, k)
        cur_t = {j: s.extend(k) for j, s in rows_t.items() if j <= limit + fam.reach}
        cur_u = {j: s.extend(k) for j, s in rows_u.items() if j <= limit + fam.reach} if rows_u else None

        def T(j: int) -> AnySeries:
            return cur_t[j] if j > 0 else zero

        def U(j: int) -> AnySeries:
            return cur_u[j] if j > 0 else zero

        for i in range(1, limit + 1):
            new_t, new_u = _recurrence_step(fam, T, U, i, t, zk)
            rows_t[i] = new_t
            if rows_u is not None:
                rows_u[i] = new_u
        logger.debug("%s recurrence: order %d on %d rows", fam.name, k, limit)

    zero = ring.constant(0, order)
    rows = {"T": {0: zero, **{i: rows_t[i] for i in range(1, top + 1)}}}
    if rows_u is not None:
        rows["U"] = {0: zero, **{i: rows_u[i] for i in range(1, top + 1)}}
    T_bulk, U_bulk = _tree(fam, ring, order)
    bulk = {"T": T_bulk} if U_bulk is None else {"T": T_bulk, "U": U_bulk}
    table = TwoPointTable(fam.name, i_max, order, "recurrence", ring.z_value, rows, {}, bulk)
    logger.info("%s recurrence table to order %d for i <= %d", fam.name, order, i_max)
    return assemble_observables(fam.name, table)


# closed forms


def _powers(x: AnySeries, count: int) -> list[AnySeries]:
    out = [_one_like(x)]
    for _ in range(count):
        out.append(out[-1] * x)
    return out


def _characteristic_root(family: Family, T: Series1) -> Series1:
    """The branch ``y = t + O(t^2)`` of the characteristic equation of a map family."""
    tT2 = T * T * Series1.variable(T.order)
    linear = tT2 - 1 if family.name == "GeneralMap" else -1
    return newton_solve([tT2, linear, tT2], Series1.zero(T.order))


def _ansatz_rows(T, U, y, alpha, shift: int, top: int) -> tuple[dict[int, AnySeries], dict[int, AnySeries]]:
    """
    Rows of the product ansatz.

    ``T_i = T (1 - y^i)(1 - alpha^2 y^(i+s)) / ((1 - alpha y^(i+1))(1 - alpha y^(i+s-1)))`` and
    ``U_i = U (1 - y^i)(1 - alpha y^(i+s)) / ((1 - y^(i+1))(1 - alpha y^(i+s-1)))``.
    """
    yp = _powers(y, top + shift + 1)
    rows_t, rows_u = {}, {}
    for i in range(top + 1):
        head = 1 - yp[i]
        rows_t[i] = T * head * (1 - alpha * alpha * yp[i + shift]) / (
            (1 - alpha * yp[i + 1]) * (1 - alpha * yp[i + shift - 1])
        )
        if U is not None:
            rows_u[i] = U * head * (1 - alpha * yp[i + shift]) / (
                (1 - yp[i + 1]) * (1 - alpha * yp[i + shift - 1])
            )
    return rows_t, rows_u


def _shift(name: str) -> int:
    return 3 if name.startswith("GeneralMap") else 4


def _closed_one_parameter(fam: Family, top: int, order: int):
    T, _ = _tree(fam, _Ring(False), order)
    y = _characteristic_root(fam, T)
    rows_t, _ = _ansatz_rows(T, None, y, 1, _shift(fam.name), top)
    return {"T": rows_t}, {"T": T}, {"y": y}


def _geometric(y: Series1, degree: int) -> Series1:
    total, power = y, y
    for _ in range(degree - 1):
        power = power * y
        total = total + power
    return total


def half_grid_roots(family: str, order: int) -> tuple[Series1, Series1]:
    """
    The two small roots ``y1(u)``, ``y2(u) = y1(-u)`` of a 3-family characteristic equation.

    ``y1 = u w`` where ``w`` solves ``T^3 (u^4 w^4 + a u^3 w^3 + b u^2 w^2 + a u w + 1) = w^2``
    with ``(a, b) = (6, 6)`` for 3-hypermaps and ``(2, 0)`` for 3-constellations.

    Args:
        family (str): ``ThreeHypermap`` or ``ThreeConstellation``.
        order (int): Grid index on the half grid.
    """
    fam = get_family(family)
    if fam.grid_step != 2:
        raise MapError(f"{fam.name} has a single characteristic root")
    a, b = (6, 6) if fam.name == "ThreeHypermap" else (2, 0)
    T, _ = _tree(fam, _Ring(False), (order + 1) // 2 + 1)
    c = (T * T * T).promote(2).truncate(order)
    u = Series1.half_variable(order)
    coefficients = [c, a * u * c, b * u * u * c - 1, a * u**3 * c, u**4 * c]
    w = newton_solve(coefficients, Series1.constant(1, order, 2))
    y1 = u * w
    return y1, y1.flip_half()


def v_functions(family: str, y1: Series1, y2: Series1, count: int, degree: int | None = None) -> list[Series1]:
    """
    The functions ``v_0 .. v_count`` in the closed forms of the 3-families.

    Args:
        family (str): ``ThreeHypermap`` or ``ThreeConstellation``.
        y1 (Series1): First root, on the half grid.
        y2 (Series1): Second root.
        count (int): Largest index.
        degree (int | None): For 3-constellations, the degree of ``p = y + ... + y^degree``;
            3 gives the 4-constellation form, 2 the 3-constellation form.
    """
    name = get_family(family).name
    out = []
    if name == "ThreeHypermap":
        c = (1 - y1 * y2).with_floor(-1) / (y1 - y2)
        p1, p2, both = y1, y2, y1 * y2
        for _ in range(count + 1):
            out.append(1 - c * p1 + c * p2 - both)
            p1, p2, both = p1 * y1, p2 * y2, both * y1 * y2
        return out
    if name != "ThreeConstellation":
        raise MapError(f"{name} has no v functions")
    degree = degree or 3
    p1, p2 = _geometric(y1, degree), _geometric(y2, degree)
    y1e, y2e = y1 ** (degree + 1), y2 ** (degree + 1)
    d = p1 - p2
    a1 = (p1 - y1e * p2).with_floor(-1) / d
    a2 = (p2 - y2e * p1).with_floor(-1) / (-d)
    b = (y2e * p1 - y1e * p2).with_floor(-1) / d
    q1 = q2 = _one_like(y1)
    for _ in range(count + 1):
        out.append(1 - a1 * q1 - a2 * q2 + b * q1 * q2)
        q1, q2 = q1 * y1, q2 * y2
    return out


def _closed_half_grid(fam: Family, top: int, order: int):
    grid = 2 * order + 4
    y1, y2 = half_grid_roots(fam.name, grid)
    T, _ = _tree(fam, _Ring(False), order + 2)
    T_half = T.promote(2).truncate(grid)
    hyper = fam.name == "ThreeHypermap"
    v = v_functions(fam.name, y1, y2, top + (3 if hyper else 5))
    rows_t = {0: Series1.zero(order)}
    for i in range(1, top + 1):
        if hyper:
            value = T_half * v[i] * v[i + 3] / (v[i + 1] * v[i + 2])
        else:
            value = T_half * v[i] * v[i + 5] / (v[i + 1] * v[i + 4])
        rows_t[i] = value.truncate(2 * order).demote()
    params = {"y1": y1.truncate(2 * order), "y2": y2.truncate(2 * order)}
    return {"T": rows_t}, {"T": T.truncate(order)}, params


def _general_parametrization() -> Parametrization:
    def t_unit(y, a):
        y2 = y * y
        y3 = y2 * y
        ay = a * y
        d = 1 + y + ay - 6 * a * y2 + a * y3 + a * a * y3 + a * a * y2 * y2
        return (1 - ay) ** 3 * (1 - a * y3) / (d * d)

    def z_unit(y, a):
        y3 = y * y * y
        return (1 - y) ** 3 * (1 - a * a * y3) / ((1 - a * y) ** 3 * (1 - a * y3))

    return Parametrization(t_unit, z_unit)


def _bipartite_parametrization() -> Parametrization:
    def t_unit(y, a):
        y2 = y * y
        return (1 - a * y) ** 2 * (1 - a * y2 * y2) / ((1 + y) ** 2 * (1 - a * y2) ** 3)

    def z_unit(y, a):
        y2 = y * y
        return (1 - y) ** 2 * (1 - y2) * (1 + a * y2) / ((1 - a * y) ** 2 * (1 - a * y2 * y2))

    return Parametrization(t_unit, z_unit)


def parametrization(family: str) -> Parametrization:
    """``t = y * t_unit(y, alpha)`` and ``z = alpha * z_unit(y, alpha)`` of a two-parameter family."""
    fam = get_family(family)
    if not fam.two_parameter:
        raise MapError(f"{fam.name} has no two-parameter parametrization")
    return _general_parametrization() if fam.name == "GeneralMap2Par" else _bipartite_parametrization()


def _closed_two_parameter(fam: Family, ring: _Ring, top: int, order: int):
    y, alpha = invert_2param(parametrization(fam.name), order, ring.z_value)
    if not ring.symbolic:
        y, alpha = y.as_series1(), alpha.as_series1()
    if fam.name == "GeneralMap2Par":
        T, U = _tree(fam, ring, order)
    else:
        y2 = y * y
        shared = (1 - alpha * y) * (1 - alpha * y2 * y2)
        T = alpha * (1 - y2) ** 2 * (1 - alpha * y2) / ((1 - alpha * y) * shared)
        U = (1 + y) * (1 - alpha * y2) ** 2 / shared
    rows_t, rows_u = _ansatz_rows(T, U, y, alpha, _shift(fam.name), top)
    return {"T": rows_t, "U": rows_u}, {"T": T, "U": U}, {"y": y, "alpha": alpha}


def closed_form(family: str, i_max: int, order: int | None = None, z=None) -> TwoPointTable:
    """
    Evaluate the explicit product forms of a family.

    Args:
        family (str): Family tag or alias.
        i_max (int): Largest distance index of the observables.
        order (int | None): Truncation order in ``t``.
        z: Rational face weight of a two-parameter family; ``None`` keeps ``z`` symbolic.

    Returns:
        TwoPointTable: Rows, observables and parameters with provenance ``closed_form``.
    """
    fam = get_family(family)
    order = _check_request(i_max, order)
    ring = _ring(fam, z)
    top = i_max + 3
    if fam.two_parameter:
        rows, bulk, params = _closed_two_parameter(fam, ring, top, order)
    elif fam.grid_step == 2:
        rows, bulk, params = _closed_half_grid(fam, top, order)
    else:
        rows, bulk, params = _closed_one_parameter(fam, top, order)
    table = TwoPointTable(fam.name, i_max, order, "closed_form", ring.z_value, rows, {}, bulk, params)
    logger.info("%s closed form to order %d for i <= %d", fam.name, order, i_max)
    return assemble_observables(fam.name, table)


# observables


def _root_edge(name: str, T, U, i: int, t: AnySeries) -> AnySeries:
    if name == "ThreeHypermap":
        return 1 + t * T(i) * T(i + 1) * (T(i - 1) + T(i) + T(i + 1) + T(i + 2))
    if name == "ThreeConstellation":
        return 1 + t * T(i) * T(i + 1) * (T(i - 1) + T(i + 2))
    return 1 + t * U(i) * T(i + 1)


def _observables(fam: Family, T, U, t: AnySeries, indices: Iterable[int], i_max: int) -> dict:
    out: dict[str, dict] = defaultdict(dict)
    for i in indices:
        if "R" in fam.observables and i >= 1:
            out["R"][i] = _root_edge(fam.name, T, U, i, t)
        if "S2" in fam.observables:
            out["S2"][i] = t * T(i + 1) * T(i + 1)
        if "calR" in fam.observables and i >= 1:
            out["calR"][i] = 1 + t * t * U(i) * U(i + 1) * T(i + 2)
        if "V" in fam.observables and i >= 1:
            full, stay = _decomposition(fam.name, T, i)
            out["V"][i] = cycle_sum(t * full) - cycle_sum(t * stay)
    if "triple" in fam.observables:
        for triple in admissible_triples(fam.name, i_max + 2):
            a, b, c = triple
            out["triple"][triple] = t * T(a + 1) * T(b + 1) * T(c + 1)
    return dict(out)


def assemble_observables(family: str, table: TwoPointTable) -> TwoPointTable:
    """
    Build ``R_i``, ``S2_i``, ``V_i``, ``calR_i`` and root-face types from the rows of a table.

    ``V_i`` is assembled from its mobile definition, as the weight of a sequence of
    black vertices at a non right-local-max white vertex.

    Args:
        family (str): Family tag; must match the table.
        table (TwoPointTable): A table with rows ``T`` (and ``U``) up to ``i_max + 3``.

    Returns:
        TwoPointTable: A copy with observables and their bulk limits.
    """
    fam = get_family(family)
    if fam.name != table.family:
        raise MapError(f"table of {table.family} assembled as {fam.name}")
    rows_t = table.rows["T"]
    rows_u = table.rows.get("U", rows_t)
    zero = rows_t[0] * 0

    def T(j: int) -> AnySeries:
        return rows_t[j] if j >= 0 else zero

    def U(j: int) -> AnySeries:
        return rows_u[j] if j >= 0 else zero

    t = _t_like(rows_t[0])
    observables = _observables(fam, T, U, t, range(table.i_max + 1), table.i_max)

    T_bulk = table.bulk["T"]
    U_bulk = table.bulk.get("U", T_bulk)
    limits = _observables(
        replace(fam, observables=tuple(o for o in fam.observables if o in ("R", "S2", "calR"))),
        lambda j: T_bulk, lambda j: U_bulk, _t_like(T_bulk), (1,), 0,
    )
    bulk = dict(table.bulk)
    for name, values in limits.items():
        bulk[name] = values[1]
    return replace(table, observables=observables, bulk=bulk)


# cross-checks


def path_counts(length: int) -> list[list[int]]:
    """
    ``counts[k][m]``: three-step paths from height 0 to height 0 of length ``k`` with ``m`` up-steps.

    Paths may go below 0, so the count is the multinomial ``k! / (m! m! (k - 2m)!)``.
    """
    return [[comb(k, m) * comb(k - m, m) for m in range(k // 2 + 1)] for k in range(length + 1)]


def _path_series(counts: list[list[int]], x: Series1, w: Series1, depth: int) -> Series1:
    """``sum_{m, j} counts[2m + j][m] w^m x^j`` over ``m + j <= depth``."""
    xs = [_one_like(x)]
    for _ in range(depth):
        xs.append(xs[-1] * x)
    total = None
    for m in range(depth, -1, -1):
        inner = xs[0] * counts[2 * m][m]
        for j in range(1, depth - m + 1):
            inner = inner + xs[j] * counts[2 * m + j][m]
        total = inner if total is None else inner + w * total
    return total


def continued_fraction_RS(family: str, order: int | None = None, z=None) -> tuple[Series1, Series1]:
    """
    Solve the path-sum system for ``R`` and ``S`` on the half grid.

    ``S = z sum_k u^k P(k - 1, R, S)`` and ``R = 1 + (z/2) sum_k u^k P(k, R, S) - S^2/2``
    with ``P(k, R, S)`` the three-step paths of length ``k`` weighted ``S`` per level
    step and ``sqrt(R)`` per up or down step.

    Args:
        family (str): ``GeneralMap`` or ``GeneralMap2Par``.
        order (int | None): Truncation order in ``t``.
        z: Rational face weight; required for ``GeneralMap2Par``.

    Returns:
        tuple[Series1, Series1]: ``(R, S)`` on the half grid.
    """
    fam = get_family(family)
    if fam.name not in ("GeneralMap", "GeneralMap2Par"):
        raise MapError(f"no continued fraction for {fam.name}")
    weight = _ring(fam, z).weight
    if fam.two_parameter and z is None:
        raise SeriesError("the weighted continued fraction needs a rational z")
    order = _check_request(1, order)
    grid = 2 * order
    counts = path_counts(grid)
    R, S = Series1.constant(1, 0, 2), Series1.zero(0, 2)
    for k in range(1, grid + 1):
        u = Series1.half_variable(k)
        Rk, Sk = R.extend(k), S.extend(k)
        paths = _path_series(counts, u * Sk, u * u * Rk, k // 2)
        S = u * paths * weight
        R = 1 + (paths - 1) * (weight / 2) - Sk * Sk / 2
    logger.debug("continued fraction solved to grid index %d", grid)
    return R, S


def continued_fraction_check(family: str, order: int | None = None, z=None) -> bool:
    """Whether the path-sum ``R, S`` equal ``1 + t U T`` and ``sqrt(t) T`` from the mobiles."""
    fam = get_family(family)
    R_cf, S_cf = continued_fraction_RS(fam.name, order, z)
    order = R_cf.order // 2
    T, U = _tree(fam, _ring(fam, z), order)
    U = T if U is None else U
    R = (1 + Series1.variable(order) * U * T).promote(2)
    S = Series1.half_variable(2 * order) * T.promote(2)
    return R.agrees_with(R_cf) and S.agrees_with(S_cf)


def bipartite_continued_fraction(order: int | None = None) -> Series1:
    """Solve ``R = 1 + sum_k t^k C(2k-1, k-1) R^k``."""
    order = _check_request(1, order)
    weights = [0] + [comb(2 * k - 1, k - 1) for k in range(1, order + 1)]
    R = Series1.constant(1, 0)
    for k in range(1, order + 1):
        tR = Series1.variable(k) * R.extend(k)
        total = Series1.constant(weights[-1], k)
        for c in reversed(weights[:-1]):
            total = total * tR + c
        R = 1 + total
    return R


def characteristic_check(family: str, order: int | None = None) -> bool:
    """
    Whether ``x = sqrt(y)`` solves the characteristic equation of the continued fraction.

    General maps: ``1 - sqrt(t)(sqrt(R) x + S + sqrt(R)/x) = t (1 - 2 sqrt(t) S + t(S^2 - 4R))^(-1/2)``.
    Bipartite maps: ``1 - t R (x + 1/x)^2 = t (1 - 4 t R)^(-1/2)``.
    """
    fam = get_family(family)
    if fam.name not in ("GeneralMap", "BipartiteMap"):
        raise MapError(f"no characteristic equation check for {fam.name}")
    order = _check_request(1, order)
    work = order + 2
    T, _ = _tree(fam, _Ring(False), work)
    y = _characteristic_root(fam, T)
    if fam.name == "BipartiteMap":
        t = Series1.variable(work)
        R = 1 + t * T * T
        inv_y = Series1.constant(1, work).with_floor(-1) / y
        lhs = 1 - t * R * (y + 2 + inv_y)
        rhs = t / sqrt_series(1 - 4 * t * R)
        return lhs.agrees_with(rhs, order)
    grid = 2 * work
    u, t = Series1.half_variable(grid), Series1.variable(work, 2)
    Th = T.promote(2)
    S = u * Th
    R = 1 + t * Th * Th
    root_R = sqrt_series(R)
    x = sqrt_series(y.promote(2))
    lhs = 1 - u * (root_R * x + S + root_R.with_floor(-1) / x)
    rhs = t / sqrt_series(1 - 2 * u * S + t * (S * S - 4 * R))
    return lhs.agrees_with(rhs, order)


def alternative_v_check(i_max: int, order: int | None = None) -> bool:
    """Whether the 3- and 4-constellation forms of ``v_i`` coincide for 3-constellations."""
    order = _check_request(i_max, order)
    y1, y2 = half_grid_roots("ThreeConstellation", 2 * order + 4)
    primary = v_functions("ThreeConstellation", y1, y2, i_max + 5, degree=3)
    other = v_functions("ThreeConstellation", y1, y2, i_max + 5, degree=2)
    return all(a.agrees_with(b, order) for a, b in zip(primary, other))


def factorized_forms(table: TwoPointTable) -> tuple[dict[str, dict[int, AnySeries]], dict[str, AnySeries]]:
    """
    The factorized closed forms of ``R_i``, ``S2_i`` and ``calR_i`` from the parameters of a closed-form table.

    Returns:
        tuple: Observables by name and index, and the closed bulk ``R`` where one is known.
    """
    if table.provenance != "closed_form":
        raise SeriesError("factorized forms need the parameters of a closed-form table")
    fam = get_family(table.family)
    indices = range(1, table.i_max + 1)
    out: dict[str, dict[int, AnySeries]] = defaultdict(dict)
    bulk: dict[str, AnySeries] = {}
    if fam.grid_step == 2:
        hyper = fam.name == "ThreeHypermap"
        y1, y2 = half_grid_roots(fam.name, 2 * table.order + 4)
        v = v_functions(fam.name, y1, y2, table.i_max + 5)
        T = table.bulk["T"]
        R = (1 + (4 if hyper else 2) * Series1.variable(table.order) * T**3).promote(2)
        for i in indices:
            ratio = v[i + 1] * v[i + 3] / (v[i + 2] * v[i + 2]) if hyper else (
                v[i + 1] * v[i + 5] / (v[i + 2] * v[i + 4])
            )
            out["R"][i] = (R * ratio).truncate(2 * table.order).demote()
        return dict(out), bulk

    y = table.parameters["y"]
    alpha = table.parameters.get("alpha", 1)
    yp = _powers(y, table.i_max + 5)
    one = _one_like(y)
    a = [one - alpha * p for p in yp]
    if fam.name in ("GeneralMap", "GeneralMap2Par"):
        R = a[2] * a[2] / (a[1] * a[3])
        bulk["R"] = R
        for i in indices:
            out["R"][i] = R * a[i + 1] * a[i + 3] / (a[i + 2] * a[i + 2])
        if fam.name == "GeneralMap":
            S2 = table.bulk["S2"]
            for i in range(0, table.i_max + 1):
                ratio = a[i + 1] * a[i + 4] / (a[i + 2] * a[i + 3])
                out["S2"][i] = S2 * ratio * ratio
    elif fam.name in ("BipartiteMap", "BipartiteMap2Par"):
        R = a[2] * a[3] / (a[1] * a[4])
        bulk["R"] = R
        for i in indices:
            out["R"][i] = R * a[i + 1] * a[i + 4] / (a[i + 2] * a[i + 3])
    else:
        calR = table.bulk["calR"]
        for i in indices:
            out["calR"][i] = calR * a[i + 2] * a[i + 4] / (a[i + 3] * a[i + 3])
    return dict(out), bulk


def check_identities(table: TwoPointTable) -> dict[str, bool]:
    """
    Structural identities of a table.

    * ``stabilization``: ``[t^n] T_i = [t^n] T`` while ``reach * n < i``;
    * ``V=logR``: the mobile definition of ``V_i`` equals ``log R_i``;
    * ``exp V=R``: ``exp(V_i)`` equals ``R_i`` of the other provenance, solved afresh;
    * ``pointed-rooted``: ``2(R - 1) + S^2 = T - 1`` for general maps;
    * ``root-face-sum``: ``R_i`` is 1 plus the root-face types starting ``(i, i - 1)``;
    * ``factorized``: the factorized closed forms match the assembled products;
    * ``root-relation``: ``y1 + 1/y1 + y2 + 1/y2 + c = 0`` for the 3-families.
    """
    fam = get_family(table.family)
    results: dict[str, bool] = {}
    T = table.bulk["T"]
    stable = True
    for i, row in table.rows["T"].items():
        top = (i - 1) // fam.reach
        if i >= 1 and top >= 0 and not row.agrees_with(T, min(top, table.order)):
            stable = False
    results["stabilization"] = stable

    if "V" in table.observables:
        results["V=logR"] = all(
            table.observables["V"][i].agrees_with(log_series(table.observables["R"][i]))
            for i in table.observables["V"]
        )
        solve = solve_recurrence if table.provenance == "closed_form" else closed_form
        other = solve(fam.name, table.i_max, table.order, table.z).observables["R"]
        results["exp V=R"] = all(
            exp_series(V).agrees_with(other[i]) for i, V in table.observables["V"].items()
        )
    if fam.name == "GeneralMap":
        lhs = 2 * (table.bulk["R"] - 1) + table.bulk["S2"]
        results["pointed-rooted"] = lhs.agrees_with(T - 1)
    if "triple" in table.observables:
        triples = table.observables["triple"]
        shapes = HYPERMAP_SHAPES if fam.name == "ThreeHypermap" else CONSTELLATION_SHAPES
        ok = True
        for i, R in table.observables["R"].items():
            total = _one_like(R)
            for shape in shapes:
                key = tuple(i + s for s in shape)
                if shape[1] == -1 and key in triples:
                    total = total + triples[key]
            ok = ok and R.agrees_with(total)
        results["root-face-sum"] = ok
    if table.provenance == "closed_form":
        forms, bulk = factorized_forms(table)
        ok = all(
            table.observables[name][i].agrees_with(s)
            for name, values in forms.items()
            for i, s in values.items()
        )
        ok = ok and all(table.bulk[name].agrees_with(s) for name, s in bulk.items())
        results["factorized"] = ok
        if fam.grid_step == 2:
            y1, y2 = table.parameters["y1"], table.parameters["y2"]
            one = Series1.constant(1, y1.order, 2).with_floor(-1)
            c = 6 if fam.name == "ThreeHypermap" else 2
            relation = y1 + one / y1 + y2 + one / y2 + c
            results["root-relation"] = relation.is_zero()
    failed = [name for name, ok in results.items() if not ok]
    if failed:
        logger.warning("%s identities failed: %s", table.family, ", ".join(failed))
    return results


def compare_provenances(family: str, i_max: int, order: int | None = None, z=None) -> list[str]:
    """Keys on which the recurrence and the closed form disagree."""
    recurrence = solve_recurrence(family, i_max, order, z)
    closed = closed_form(family, i_max, order, z)
    bad = recurrence.mismatches(closed)
    if bad:
        logger.warning("%s: recurrence and closed form differ on %s", family, ", ".join(bad))
    return bad


@dataclass
class AnsatzReport:
    """
    Residuals of a two-parameter closed form.

    Attributes:
        family (str): Family tag.
        i_max (int): Largest checked index.
        order (int): Truncation order in ``t``.
        z (Fraction | None): Face weight, ``None`` when symbolic.
        residuals (dict[str, str | None]): First nonzero ``t``-order of each residual.
    """

    family: str
    i_max: int
    order: int
    z: Fraction | None
    residuals: dict[str, str | None]

    @property
    def ok(self) -> bool:
        return all(value is None for value in self.residuals.values())

    def failures(self) -> list[str]:
        return sorted(name for name, value in self.residuals.items() if value is not None)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "i_max": self.i_max,
            "order": self.order,
            "z": None if self.z is None else str(self.z),
            "ok": self.ok,
            "residuals": dict(sorted(self.residuals.items())),
        }


def verify_ansatz(family: str, i_max: int, order: int | None = None, z=None) -> AnsatzReport:
    """
    Substitute a two-parameter closed form into its defining equations.

    Args:
        family (str): A two-parameter family.
        i_max (int): Largest index of the recurrence residuals.
        order (int | None): Truncation order in ``t``.
        z: Rational face weight, ``None`` for exact polynomial coefficients.

    Returns:
        AnsatzReport: Recurrence, tree, parametrization and factorization residuals,
        and the ``z = 1`` reduction when ``z`` is symbolic or 1.
    """
    fam = get_family(family)
    if not fam.two_parameter:
        raise MapError(f"{fam.name} is not a two-parameter family")
    table = closed_form(fam.name, i_max, order, z)
    order = table.order
    ring = _ring(fam, z)
    t, zs = ring.t(order), ring.z(order)
    general = fam.name == "GeneralMap2Par"
    rows_t, rows_u = table.rows["T"], table.rows["U"]
    residuals: dict[str, str | None] = {}
    for i in range(1, i_max + 1):
        Ti, Ui, Tm, Um, Tp = rows_t[i], rows_u[i], rows_t[i - 1], rows_u[i - 1], rows_t[i + 1]
        if general:
            rt = Ti - zs - t * (Ti * Um + Ti * Ti + Ui * Tp)
            ru = Ui - 1 - t * (Ui * Um + Ui * Ti + Ui * Tp)
        else:
            rt = Ti - zs - t * (Ti * Um + Ui * Tp)
            ru = Ui - 1 - t * (Ui * Um + Ui * Tp)
        residuals[f"T_{i}"] = _first_order(rt)
        residuals[f"U_{i}"] = _first_order(ru)

    T, U = table.bulk["T"], table.bulk["U"]
    if general:
        residuals["tree:T"] = _first_order(T - zs - t * (T * T + 2 * T * U))
        residuals["tree:U"] = _first_order(U - 1 - t * (2 * T * U + U * U))
    else:
        residuals["tree:T"] = _first_order(T - zs - 2 * t * T * U)
        residuals["tree:U"] = _first_order(U - 1 - t * U * (T + U))

    y, alpha = table.parameters["y"], table.parameters["alpha"]
    param = parametrization(fam.name)
    residuals["param:t"] = _first_order(y * param.t_unit(y, alpha) - t)
    residuals["param:z"] = _first_order(alpha * param.z_unit(y, alpha) - zs)
    if general:
        ay = alpha * y
        residuals["param:tT2"] = _first_order(
            t * T * T * (1 - ay) ** 3 * (1 - ay * y * y) - alpha * alpha * y * (1 - y) ** 4
        )
        residuals["param:U/T"] = _first_order(alpha * U * (1 - y) ** 2 - T * (1 - ay) ** 2)

    forms, bulk = factorized_forms(table)
    for name, values in forms.items():
        for i, s in values.items():
            residuals[f"factorized:{name}_{i}"] = _first_order(table.observables[name][i] - s)
    for name, s in bulk.items():
        residuals[f"factorized:{name}"] = _first_order(table.bulk[name] - s)

    if z is None or Fraction(z) == 1:
        base = closed_form(fam.base, i_max, order)

        def at_one(s: AnySeries) -> Series1:
            return s.at_z(1) if isinstance(s, Series2) else s

        residuals["z=1:alpha"] = _first_order(at_one(alpha) - 1)
        for i in range(1, i_max + 1):
            expected = base.rows["T"][i]
            residuals[f"z=1:T_{i}"] = _first_order(at_one(rows_t[i]) - expected)
            residuals[f"z=1:U_{i}"] = _first_order(at_one(rows_u[i]) - expected)

    report = AnsatzReport(fam.name, i_max, order, ring.z_value, residuals)
    logger.info("%s ansatz check: %s", fam.name, "ok" if report.ok else ", ".join(report.failures()))
    return report
