from fractions import Fraction

import pytest

from src.services.errors import CapacityError, MapError, SeriesError
from src.services.oracle import cumulative_count, pointed_rooted_profile, triple_count
from src.services.series import Series1, Series2
from src.services.twopoint import (
    admissible_triples,
    alternative_v_check,
    bipartite_continued_fraction,
    characteristic_check,
    check_identities,
    closed_form,
    compare_provenances,
    continued_fraction_RS,
    continued_fraction_check,
    get_family,
    path_counts,
    solve_recurrence,
    verify_ansatz,
)

ONE_PARAMETER = ["GeneralMap", "BipartiteMap", "GeneralHypermap"]
HALF_GRID = ["ThreeHypermap", "ThreeConstellation"]
TWO_PARAMETER = ["GeneralMap2Par", "BipartiteMap2Par", "GeneralHypermap2Par"]
# the sqrt(t) and symbolic-z families stop at order 20
FULL_ORDER = {**dict.fromkeys(ONE_PARAMETER, 30), **dict.fromkeys(HALF_GRID + TWO_PARAMETER, 20)}


def coefficients(s, count):
    return [s.coefficient(n) for n in range(count)]


def test_family_aliases():
    assert get_family("general").name == "GeneralMap"
    assert get_family("3-constellation").name == "ThreeConstellation"
    assert get_family("BipartiteMap2Par").base == "BipartiteMap"

    with pytest.raises(MapError):
        get_family("Triangulation")


def test_general_map_first_row():
    table = solve_recurrence("GeneralMap", 1, order=2)

    assert coefficients(table.series("T", 1), 3) == [1, 2, 9]


def test_general_map_bulk():
    table = closed_form("GeneralMap", 1, order=3)

    assert coefficients(table.series("T"), 4) == [1, 3, 18, 135]
    assert coefficients(table.series("R"), 4) == [1, 1, 6, 45]


def test_single_edge_observables():
    table = solve_recurrence("GeneralMap", 2, order=3)

    assert table.series("R", 1).coefficient(1) == 1
    assert table.series("S2", 0).coefficient(1) == 1


@pytest.mark.parametrize("family", ONE_PARAMETER)
def test_recurrence_matches_closed_form(family):
    assert compare_provenances(family, 4, order=8) == []


@pytest.mark.parametrize("family", HALF_GRID)
def test_half_grid_recurrence_matches_closed_form(family):
    assert compare_provenances(family, 3, order=5) == []


@pytest.mark.parametrize("family", TWO_PARAMETER)
def test_two_parameter_recurrence_matches_closed_form(family):
    assert compare_provenances(family, 2, order=4) == []


@pytest.mark.parametrize("z", [Fraction(1, 2), 2, 3])
def test_two_parameter_at_rational_weight(z):
    assert compare_provenances("GeneralMap2Par", 3, order=6, z=z) == []


@pytest.mark.slow
@pytest.mark.parametrize("family", ONE_PARAMETER + HALF_GRID + TWO_PARAMETER)
def test_recurrence_matches_closed_form_full_order(family):
    assert compare_provenances(family, 8, order=FULL_ORDER[family]) == []


@pytest.mark.slow
@pytest.mark.parametrize("z", [Fraction(1, 2), 2, 3])
def test_weighted_recurrence_matches_closed_form_full_order(z):
    assert compare_provenances("GeneralMap2Par", 8, order=20, z=z) == []


@pytest.mark.slow
@pytest.mark.parametrize("family", ONE_PARAMETER + HALF_GRID)
def test_identities_full_order(family):
    results = check_identities(closed_form(family, 8, order=FULL_ORDER[family]))

    assert all(results.values()), results


@pytest.mark.slow
@pytest.mark.parametrize("family", TWO_PARAMETER)
def test_alpha_is_one_at_unit_weight_full_order(family):
    alpha = closed_form(family, 1, order=30).series("alpha")

    assert alpha.at_z(1) == Series1.constant(1, 30)


@pytest.mark.slow
@pytest.mark.parametrize("z", [None, Fraction(1, 2), 2, 3])
def test_continued_fraction_full_order(z):
    family = "GeneralMap" if z is None else "GeneralMap2Par"

    assert continued_fraction_check(family, 30, z)


@pytest.mark.slow
def test_bipartite_continued_fraction_full_order():
    expected = closed_form("BipartiteMap", 1, order=30).series("R")

    assert bipartite_continued_fraction(30).agrees_with(expected)


@pytest.mark.slow
@pytest.mark.parametrize("family", ["GeneralMap", "BipartiteMap"])
def test_characteristic_full_order(family):
    assert characteristic_check(family, 30)


def test_padding_does_not_change_rows():
    narrow = solve_recurrence("ThreeConstellation", 2, order=5, padding=0)
    wide = solve_recurrence("ThreeConstellation", 2, order=5, padding=6)

    assert narrow.mismatches(wide) == []


def test_printed_general_expansions():
    table = closed_form("GeneralMap2Par", 1, order=4)
    y, alpha = table.series("y"), table.series("alpha")

    assert [y[n] for n in range(5)] == [
        (),
        (1,),
        (2, 5),
        (5, 31, 23),
        (14, 153, 275, 102),
    ]
    assert [alpha[n] for n in range(4)] == [
        (0, 1),
        (0, 3, -3),
        (0, 12, -9, -3),
        (0, 49, 2, -47, -4),
    ]


def test_printed_bipartite_expansions():
    table = closed_form("BipartiteMap2Par", 1, order=4)
    y, alpha = table.series("y"), table.series("alpha")

    assert [y[n] for n in range(5)] == [
        (),
        (1,),
        (2, 2),
        (5, 13, 3),
        (14, 66, 40, 4),
    ]
    assert [alpha[n] for n in range(4)] == [(0, 1), (0, 2, -2), (0, 8, -9, 1), (0, 32, -32)]


@pytest.mark.parametrize("family", TWO_PARAMETER)
def test_alpha_is_one_at_unit_weight(family):
    alpha = closed_form(family, 1, order=5).series("alpha")

    assert alpha.at_z(1) == Series1.constant(1, 5)


@pytest.mark.parametrize("family", ONE_PARAMETER + HALF_GRID)
def test_closed_form_identities(family):
    order = 4 if family in HALF_GRID else 7
    results = check_identities(closed_form(family, 3, order=order))

    assert results
    assert all(results.values()), results


def test_recurrence_identities():
    results = check_identities(solve_recurrence("GeneralMap", 4, order=7))

    assert set(results) == {"stabilization", "V=logR", "exp V=R", "pointed-rooted"}
    assert all(results.values())


def test_two_parameter_identities():
    results = check_identities(closed_form("BipartiteMap2Par", 3, order=4))

    assert results["stabilization"]
    assert results["factorized"]


def test_triple_lookup():
    table = closed_form("ThreeHypermap", 2, order=3)

    assert table.triple((1, 0, 2)).coefficient(1) == 1
    with pytest.raises(MapError):
        table.triple((0, 0, 3))


def test_constellation_triples():
    assert admissible_triples("ThreeConstellation", 2) == [(0, 2, 1), (1, 0, 2), (2, 1, 0)]

    with pytest.raises(MapError):
        admissible_triples("GeneralMap", 2)


def test_path_counts():
    counts = path_counts(4)

    assert counts[2] == [1, 2]
    assert counts[4] == [1, 12, 6]


def test_continued_fraction_matches_mobiles():
    assert continued_fraction_check("GeneralMap", order=6)


def test_continued_fraction_R():
    R, S = continued_fraction_RS("GeneralMap", order=3)

    assert R.demote().dense() == [1, 1, 6, 45]
    assert S.coefficient(Fraction(1, 2)) == 1
    assert S.coefficient(Fraction(3, 2)) == 3


@pytest.mark.parametrize("z", [Fraction(1, 2), 2, 3])
def test_weighted_continued_fraction(z):
    assert continued_fraction_check("GeneralMap2Par", order=5, z=z)


def test_weighted_continued_fraction_reduces_at_unit_weight():
    weighted = continued_fraction_RS("GeneralMap2Par", order=4, z=1)
    plain = continued_fraction_RS("GeneralMap", order=4)

    assert weighted == plain


def test_continued_fraction_scope():
    with pytest.raises(MapError):
        continued_fraction_RS("BipartiteMap", order=3)
    with pytest.raises(SeriesError):
        continued_fraction_RS("GeneralMap2Par", order=3)


def test_bipartite_continued_fraction():
    R = bipartite_continued_fraction(order=8)

    assert R.agrees_with(closed_form("BipartiteMap", 1, order=8).series("R"))


@pytest.mark.parametrize("family", ["GeneralMap", "BipartiteMap"])
def test_characteristic_equation(family):
    assert characteristic_check(family, order=5)


def test_alternative_constellation_v():
    assert alternative_v_check(3, order=4)


@pytest.mark.parametrize("family", TWO_PARAMETER)
def test_verify_ansatz(family):
    report = verify_ansatz(family, 3, order=4)

    assert report.ok, report.failures()
    assert "z=1:alpha" in report.residuals


def test_verify_ansatz_at_rational_weight():
    report = verify_ansatz("GeneralMap2Par", 4, order=6, z=Fraction(2, 3))

    assert report.ok, report.failures()
    assert "z=1:alpha" not in report.residuals
    assert report.to_json()["z"] == "2/3"


def test_verify_ansatz_needs_two_parameters():
    with pytest.raises(MapError):
        verify_ansatz("GeneralMap", 2, order=3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_general_maps_against_oracle(n):
    table = closed_form("GeneralMap", 4, order=3)
    report = pointed_rooted_profile(n)

    for i in range(1, 5):
        assert cumulative_count(report, i) == table.series("R", i).coefficient(n)
    for i in range(0, 4):
        assert cumulative_count(report, i, diagonal=True) == table.series("S2", i).coefficient(n)


@pytest.mark.parametrize("n", [1, 2])
def test_bipartite_maps_against_oracle(n):
    table = closed_form("BipartiteMap", 3, order=2)
    report = pointed_rooted_profile(n, "BipartiteMap")

    for i in range(1, 4):
        assert cumulative_count(report, i) == table.series("R", i).coefficient(n)


def test_face_weights_against_oracle():
    table = solve_recurrence("GeneralMap2Par", 3, order=2)
    report = pointed_rooted_profile(2, "GeneralMap2Par")

    for i in range(1, 4):
        R = table.series("R", i)
        assert isinstance(R, Series2)
        for k in range(4):
            assert cumulative_count(report, i, faces=k) == R.coefficient(2, k)


def test_three_hypermaps_against_oracle():
    table = closed_form("ThreeHypermap", 3, order=2)
    report = pointed_rooted_profile(1, "ThreeHypermap", kind="face")

    assert table.series("R", 1).coefficient(1) == 3
    assert table.series("R", 2).coefficient(1) == 4
    for triple in admissible_triples("ThreeHypermap", 4):
        assert triple_count(report, triple) == table.triple(triple).coefficient(1)


def test_three_constellations_against_oracle():
    table = closed_form("ThreeConstellation", 2, order=2)
    report = pointed_rooted_profile(1, "ThreeConstellation", kind="face")

    for triple in admissible_triples("ThreeConstellation", 4):
        assert triple_count(report, triple) == table.triple(triple).coefficient(1)


@pytest.mark.slow
@pytest.mark.parametrize("family", HALF_GRID)
def test_two_dark_faces_against_oracle(family):
    table = closed_form(family, 3, order=2)
    report = pointed_rooted_profile(2, family)

    for i in range(1, 4):
        assert cumulative_count(report, i) == table.series("R", i).coefficient(2)


def test_general_hypermaps_against_oracle():
    table = closed_form("GeneralHypermap", 2, order=2)
    report = pointed_rooted_profile(2, "GeneralHypermap")

    assert cumulative_count(report, 1) == table.series("calR", 1).coefficient(2)


def test_table_json():
    payload = closed_form("ThreeConstellation", 1, order=2).to_json()

    assert payload["provenance"] == "closed_form"
    assert "T_3" in payload["series"]
    assert "triple_2,1,0" in payload["series"]
    assert set(payload["parameters"]) == {"y1", "y2"}


def test_table_csv():
    table = solve_recurrence("GeneralMap", 1, order=2)

    assert table.to_csv("T", 1).splitlines() == [
        "exponent,coefficient",
        "0,1",
        "1,2",
        "2,9",
    ]


def test_missing_series():
    table = solve_recurrence("BipartiteMap", 1, order=2)

    with pytest.raises(SeriesError):
        table.series("S2", 0)


def test_requests_are_checked(monkeypatch):
    with pytest.raises(CapacityError):
        solve_recurrence("GeneralMap", 0, order=3)
    with pytest.raises(SeriesError):
        closed_form("GeneralMap", 1, order=3, z=2)

    monkeypatch.setattr("src.services.twopoint.settings.MAX_SERIES_ORDER", 5)
    with pytest.raises(CapacityError):
        closed_form("GeneralMap", 1, order=6)
