from fractions import Fraction

import mpmath as mp
import pytest

from src.services.asymptotics import (
    asymptotic_constants,
    characteristic_H,
    cpq_identity_check,
    estimate_asymptotics,
    richardson,
)
from src.services.errors import CapacityError, MapError, SeriesError


def test_general_map_constants():
    at_zero = asymptotic_constants("general", 0)
    at_one = asymptotic_constants("general", 1)

    assert at_zero.e_down == Fraction(28, 9)
    assert at_zero.e_level == Fraction(8, 9)
    assert at_zero.e_down + at_zero.e_level == 4
    assert at_zero.v is None
    assert at_one.e_up == Fraction(28, 9)
    assert at_one.v == Fraction(21, 8)


def test_bipartite_map_constants():
    at_zero = asymptotic_constants("bipartite", 0)

    assert at_zero.e_down == 3
    assert at_zero.e_level is None
    assert asymptotic_constants("bipartite", 1).e_up == 3


@pytest.mark.parametrize("family", ["GeneralMap", "BipartiteMap"])
@pytest.mark.parametrize("i", range(6))
def test_edge_types_are_symmetric(family, i):
    assert asymptotic_constants(family, i + 1).e_up == asymptotic_constants(family, i).e_down


def test_constants_json():
    payload = asymptotic_constants("GeneralMap", 1).to_json()

    assert payload["e_up"] == "28/9"
    assert payload["v"] == "21/8"


def test_constants_scope():
    with pytest.raises(MapError):
        asymptotic_constants("ThreeHypermap", 1)
    with pytest.raises(MapError):
        asymptotic_constants("GeneralMap", -1)


def test_richardson_removes_inverse_powers():
    values = [3 + mp.mpf(2) / n - mp.mpf(5) / n**2 for n in range(10, 13)]

    assert abs(richardson(values, 10) - 3) < 1e-12


def test_estimator_refuses_short_series():
    with pytest.raises(CapacityError):
        estimate_asymptotics("GeneralMap", 1, 49)


def test_estimator_scope():
    with pytest.raises(MapError):
        estimate_asymptotics("GeneralHypermap", 1, 60)
    with pytest.raises(MapError):
        estimate_asymptotics("BipartiteMap", 1, 60, observable="S2")
    with pytest.raises(MapError):
        estimate_asymptotics("GeneralMap", 1, 60, observable="W")


def test_estimator_general_maps():
    estimate = estimate_asymptotics("GeneralMap", 1, 50)

    assert estimate.exact == Fraction(28, 9)
    assert estimate.relative_error < 0.01
    assert estimate.to_json()["exact"] == "28/9"


@pytest.mark.slow
@pytest.mark.parametrize("family, observable", [("GeneralMap", "R"), ("BipartiteMap", "R"), ("GeneralMap", "V")])
def test_estimator_at_order_400(family, observable):
    estimate = estimate_asymptotics(family, 1, 400, observable=observable)

    assert estimate.relative_error < 0.01


@pytest.mark.slow
def test_estimator_level_edges():
    estimate = estimate_asymptotics("GeneralMap", 0, 80, observable="S2")

    assert estimate.exact == Fraction(8, 9)
    assert estimate.relative_error < 0.01


@pytest.mark.parametrize("p", [2, 3, 4, 5])
@pytest.mark.parametrize("t", [Fraction(1, 100), Fraction(1, 200)])
def test_cpq_identity(p, t):
    report = cpq_identity_check(p, t)

    assert report.ok
    assert len(report.roots) == p - 1


def test_cpq_single_root_is_trivial():
    report = cpq_identity_check(2, Fraction(1, 20))

    assert report.max_deviation == 0
    assert report.to_json()["ok"] is True


def test_roots_share_characteristic_value():
    report = cpq_identity_check(4, Fraction(1, 200))
    a, b, c = report.roots

    assert abs(characteristic_H(4, a) - characteristic_H(4, b)) < 1e-12
    assert abs(characteristic_H(4, b) - characteristic_H(4, c)) < 1e-12


def test_cpq_scope():
    with pytest.raises(CapacityError):
        cpq_identity_check(7, Fraction(1, 1000))
    with pytest.raises(SeriesError):
        cpq_identity_check(3, Fraction(1, 10))
