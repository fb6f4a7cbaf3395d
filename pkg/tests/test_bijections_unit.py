import pytest

from src.services.bijections import (
    bipartite_to_hypermap,
    classical_bijections,
    classical_bipartite_to_hypermap,
    classical_constellation_to_regular,
    classical_hypermap_to_bipartite,
    classical_regular_to_constellation,
    constellation_to_descending_mobile,
    constellation_to_regular,
    descending_mobile_to_constellation,
    encode_pointed,
    hypermap_edge_to_mobile_triple,
    hypermap_to_bipartite,
    hypermap_to_mobile,
    mobile_to_hypermap,
    phi,
    phi_minus,
    psi,
    psi_minus,
    quadrangulation_check,
    regular_to_constellation,
)
from src.services.errors import BijectionError, LabelError, MobileError
from src.services.labels import completion, local_extrema, opp, validate_mirror, validate_well_labelled
from src.services.maps import (
    build_map,
    directed_distances,
    graph_distances,
    hypermap_code,
    hypermap_from_hyperdarts,
    hypermap_to_map,
    map_code,
    map_to_hypermap,
    vertex_map,
)
from src.services.mobiles import Flavor, enumerate_mobiles, parse_mobile, validate
from src.services.oracle import Constraints, enumerate_labelled, enumerate_rooted_maps, pointed_rooted_profile


@pytest.fixture
def bridge():
    return build_map([0, 1], [1, 0])


@pytest.fixture
def square():
    return build_map([7, 2, 1, 4, 3, 6, 5, 0], [1, 0, 3, 2, 5, 4, 7, 6])


@pytest.fixture
def path3():
    # a - b - c - d
    return build_map([0, 2, 1, 4, 3, 5], [1, 0, 3, 2, 5, 4])


@pytest.fixture
def dark_triangle():
    return hypermap_from_hyperdarts([0, 1, 2], [1, 2, 0]).hypermap


def pointed_maps(n):
    for c in enumerate_rooted_maps(n).classes:
        m = c.structure()
        for v in range(m.n_vertices):
            yield m, v


def blown_up(m, v):
    h = map_to_hypermap(m)
    return h, h.map.origin(2 * m.vertices[v][0])


def hypermaps(n):
    return [c.structure() for c in pointed_rooted_profile(n, "GeneralHypermap").classes]


def three_constellations(darks):
    return [c.structure() for c in enumerate_rooted_maps(3 * darks, Constraints(p_constellation=3)).classes]


def test_zero_edge_map_rejected():
    with pytest.raises(BijectionError):
        phi(vertex_map(), (0,))


def test_unsuitable_labelling_rejected(bridge):
    with pytest.raises(LabelError):
        phi(bridge, (0, 0))


def test_closing_requires_well_labelling(dark_triangle):
    labels = [0, 0, 0]
    m = dark_triangle.map
    e = dark_triangle.canonical_darts[0]
    labels[m.target(e)] = 2
    with pytest.raises(LabelError):
        psi(dark_triangle, labels)


def test_opening_the_bridge(bridge):
    opened, corr = phi(bridge, (0, 1))
    h = opened.hypermap

    assert opened.labels == (1,)
    assert h.n_edges == 1
    assert [h.map.face_degree(f) for f in h.dark_faces] == [1]
    assert list(corr.light_faces.values()) == [0]
    assert corr.darts == {0: 1}


def test_closing_the_bridge_back(bridge):
    opened, _ = phi(bridge, (0, 1))

    closed, corr = psi(opened.hypermap, opened.labels)

    assert map_code(closed.map, closed.labels) == map_code(bridge, (0, 1))
    assert closed.labels[next(iter(corr.light_faces.values()))] == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_close_after_open_is_identity(n):
    for lm in enumerate_labelled(n, "suitable"):
        opened, fwd = phi(lm.map, lm.labels)
        closed, back = psi(opened.hypermap, opened.labels)

        assert map_code(closed.map, closed.labels) == map_code(lm.map, lm.labels)
        if lm.labels[lm.map.target(0)] == lm.labels[lm.map.origin(0)] - 1:
            c = next(c for c, d in fwd.darts.items() if d == 0)
            assert map_code(closed.map, closed.labels, root=back.darts[c]) == map_code(lm.map, lm.labels, root=0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_open_after_close_is_identity(n):
    for lh in enumerate_labelled(n, "well-labelled"):
        closed, _ = psi(lh.hypermap, lh.labels)
        opened, _ = phi(closed.map, closed.labels)

        assert hypermap_code(opened.hypermap, opened.labels) == hypermap_code(lh.hypermap, lh.labels)


@pytest.mark.slow
def test_round_trips_with_four_edges():
    for lm in enumerate_labelled(4, "suitable"):
        opened, _ = phi(lm.map, lm.labels)
        closed, _ = psi(opened.hypermap, opened.labels)
        assert map_code(closed.map, closed.labels) == map_code(lm.map, lm.labels)
    for lh in enumerate_labelled(4, "well-labelled"):
        closed, _ = psi(lh.hypermap, lh.labels)
        opened, _ = phi(closed.map, closed.labels)
        assert hypermap_code(opened.hypermap, opened.labels) == hypermap_code(lh.hypermap, lh.labels)


@pytest.mark.parametrize("n", [1, 2])
def test_rooted_counts_match_through_opening(n):
    # maps are rooted on any dart, hypermaps on canonical darts only
    assert len(enumerate_labelled(n, "suitable")) == 2 * len(enumerate_labelled(n, "well-labelled"))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_opening_correspondence(n):
    for lm in enumerate_labelled(n, "suitable"):
        opened, corr = phi(lm.map, lm.labels)
        h = opened.hypermap
        mins, _ = local_extrema(lm.map, lm.labels)

        assert validate_well_labelled(h, opened.labels)
        assert h.n_edges == lm.map.n_edges
        assert sorted(corr.light_faces) == list(h.light_faces)
        assert set(corr.light_faces.values()) == mins
        for f, u in corr.light_faces.items():
            assert lm.labels[u] == min(opened.labels[h.map.origin(d)] for d in h.map.faces[f]) - 1
        assert set(corr.vertices.values()) == set(range(lm.map.n_vertices)) - mins
        assert sorted(match.face for match in corr.dark_faces.values()) == list(range(lm.map.n_faces))
        for match in corr.dark_faces.values():
            assert completion(match.dark_type, "lower") == match.face_type


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mirror_opening_correspondence(n):
    for lm in enumerate_labelled(n, "suitable"):
        opened, corr = phi_minus(lm.map, lm.labels)
        h = opened.hypermap
        b = lm.map
        _, maxs = local_extrema(b, lm.labels)

        assert validate_mirror(h, opened.labels)
        assert h.n_edges == b.n_edges
        assert sorted(corr.light_faces) == list(h.light_faces)
        assert set(corr.light_faces.values()) == maxs
        for f, u in corr.light_faces.items():
            assert lm.labels[u] == max(opened.labels[h.map.origin(d)] for d in h.map.faces[f]) + 1
        assert set(corr.vertices.values()) == set(range(b.n_vertices)) - maxs
        for v, u in corr.vertices.items():
            rising = [d for d in b.vertices[u] if lm.labels[b.target(d)] == lm.labels[u] + 1]
            assert sum(1 for d in h.map.vertices[v] if h.is_canonical(d)) == len(rising)
        for match in corr.dark_faces.values():
            assert completion(match.dark_type, "upper") == match.face_type


def test_mirror_opening_of_bridge_is_a_dark_loop(bridge):
    opened, corr = phi_minus(bridge, (0, 1))
    h = opened.hypermap

    assert h.map.n_vertices == 1
    assert [h.map.face_degree(f) for f in h.dark_faces] == [1]
    assert opened.labels == (0,)
    assert corr.vertices == {0: 0}
    assert corr.light_faces == {h.light_faces[0]: 1}
    assert corr.darts == {0: 0}


@pytest.mark.parametrize("n", [1, 2])
def test_mirror_opening_is_conjugate_by_opp(n):
    for lm in enumerate_labelled(n, "suitable"):
        mirrored, mirror_corr = phi_minus(lm.map, lm.labels)
        plain, plain_corr = phi(lm.map, opp(lm.labels))

        assert mirrored.hypermap == plain.hypermap
        assert mirrored.labels == opp(plain.labels)
        assert mirror_corr.vertices == plain_corr.vertices
        assert mirror_corr.light_faces == plain_corr.light_faces
        assert mirror_corr.darts == plain_corr.darts


@pytest.mark.parametrize("n", [1, 2])
def test_mirror_closing_inverts_mirror_opening(n):
    for lm in enumerate_labelled(n, "suitable"):
        opened, _ = phi_minus(lm.map, lm.labels)
        closed, _ = psi_minus(opened.hypermap, opened.labels)

        assert map_code(closed.map, closed.labels) == map_code(lm.map, lm.labels)


def test_closing_light_faces_get_apex_below_minimum():
    for lh in enumerate_labelled(2, "well-labelled"):
        closed, corr = psi(lh.hypermap, lh.labels)
        m = lh.hypermap.map
        for f, apex in corr.light_faces.items():
            low = min(lh.labels[m.origin(d)] for d in m.faces[f])
            assert closed.labels[apex] == low - 1


def test_bridge_encodes_as_single_black_mobile(bridge):
    h, pointed = blown_up(bridge, 0)

    assert hypermap_to_mobile(h, pointed, root=0).encode() == "1[2]"


def test_single_edge_mobiles():
    found = {
        hypermap_to_mobile(*blown_up(m, v), root=0).encode()
        for m, v in pointed_maps(1)
    }

    assert found == {"1[2]", "2[1]", "1[1]"}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pointed_rooted_maps_hit_every_plain_mobile_once(n):
    found = [hypermap_to_mobile(*blown_up(m, v), root=0).encode() for m, v in pointed_maps(n)]
    expected = [
        mobile.encode()
        for label in range(1, 2 * n + 2)
        for mobile in enumerate_mobiles(Flavor(p=2), n, label)
    ]

    assert sorted(found) == sorted(expected)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mobile_round_trip_restores_pointed_rooted_map(n):
    for m, v in pointed_maps(n):
        h, pointed = blown_up(m, v)

        decoded = mobile_to_hypermap(hypermap_to_mobile(h, pointed, root=0))

        assert decoded.labels == directed_distances(decoded.hypermap, decoded.pointed)
        assert hypermap_code(decoded.hypermap, pointed=decoded.pointed, root=decoded.root) == hypermap_code(
            h, pointed=pointed, root=0
        )


def test_decoding_the_smallest_mobile(bridge):
    decoded = mobile_to_hypermap(parse_mobile("1[2]"))
    m = decoded.hypermap.map

    assert map_code(hypermap_to_map(decoded.hypermap)) == map_code(bridge)
    assert m.origin(decoded.root) == decoded.pointed


def test_bare_mobile_rejected():
    with pytest.raises(BijectionError):
        mobile_to_hypermap(parse_mobile("1"))


def test_mobile_with_wrong_minimum_rejected():
    with pytest.raises(MobileError):
        mobile_to_hypermap(parse_mobile("2[3]"))


def test_unrooted_encoding_is_canonical(square):
    h, pointed = blown_up(square, 0)

    planted = {hypermap_to_mobile(h, pointed, root=e).encode() for e in h.canonical_darts}

    assert hypermap_to_mobile(h, pointed).encode() == min(planted)


def test_encoding_correspondence(square):
    h = map_to_hypermap(square)
    for pointed in range(h.map.n_vertices):
        encoding = encode_pointed(h, pointed)
        labels = directed_distances(h, pointed)
        m = h.map

        assert set(encoding.vertices) == set(range(m.n_vertices)) - {pointed}
        for v, w in encoding.vertices.items():
            assert encoding.labels[w] == labels[v]
        assert set(encoding.dark_faces.values()) == encoding.star.black
        for f, w in encoding.light_faces.items():
            assert encoding.labels[w] == max(labels[m.origin(d)] for d in m.faces[f]) + 1


def test_encoding_rejects_light_root(square):
    h, pointed = blown_up(square, 0)

    with pytest.raises(BijectionError):
        encode_pointed(h, pointed, root=1)


def test_bipartite_blow_up_gives_two_descending_mobile(square):
    c = map_to_hypermap(square)

    mobile = constellation_to_descending_mobile(c, 0, root=0)
    back = descending_mobile_to_constellation(mobile)

    assert validate(mobile, Flavor(p=2, descending=True))
    assert hypermap_code(back.hypermap, pointed=back.pointed, root=back.root) == hypermap_code(c, pointed=0, root=0)


def test_descending_mobile_required():
    with pytest.raises(MobileError):
        descending_mobile_to_constellation(parse_mobile("1[1]"))


def test_non_constellation_rejected():
    loop = build_map([1, 0], [1, 0])

    with pytest.raises(BijectionError):
        constellation_to_descending_mobile(map_to_hypermap(loop), 0)


@pytest.mark.parametrize("darks", [1, 2])
def test_three_constellation_mobiles(darks):
    for c in three_constellations(darks):
        for v in range(c.map.n_vertices):
            mobile = constellation_to_descending_mobile(c, v, root=0)
            back = descending_mobile_to_constellation(mobile)

            assert mobile.n_black == darks
            assert hypermap_code(back.hypermap, pointed=back.pointed, root=back.root) == hypermap_code(
                c, pointed=v, root=0
            )


@pytest.mark.parametrize("darks", [1, 2])
def test_regular_constellation_round_trip(darks):
    for c in three_constellations(darks):
        for v in range(c.map.n_vertices):
            labels = directed_distances(c, v)

            regular, corr = constellation_to_regular(c, v)
            again = regular_to_constellation(regular.hypermap, regular.pointed)

            assert regular.hypermap.is_p_hypermap(4)
            assert regular.hypermap.map.genus == 0
            assert all(regular.labels[corr.vertices[x]] == labels[x] for x in range(c.map.n_vertices))
            assert hypermap_code(again.hypermap, again.labels, again.pointed) == hypermap_code(c, labels, v)


def test_regular_light_faces_hold_local_maxima(dark_triangle):
    labels = directed_distances(dark_triangle, 0)
    m = dark_triangle.map

    regular, corr = constellation_to_regular(dark_triangle, 0)

    for f, u in corr.light_faces.items():
        assert regular.labels[u] == max(labels[m.origin(d)] for d in m.faces[f]) + 1


@pytest.mark.parametrize("darks", [1, 2])
def test_classical_colour_insertion_round_trip(darks):
    for c in three_constellations(darks):
        for v in range(c.map.n_vertices):
            regular = classical_constellation_to_regular(c, v)
            back = classical_regular_to_constellation(regular.hypermap, regular.pointed)

            assert regular.hypermap.is_p_hypermap(4)
            assert regular.hypermap.map.genus == 0
            assert regular.hypermap.map.n_vertices == c.map.n_vertices + len(c.light_faces)
            assert hypermap_code(back.hypermap, pointed=back.pointed) == hypermap_code(c, pointed=v)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_classical_parity_round_trip(n):
    for c in enumerate_rooted_maps(n, Constraints(bipartite=True)).classes:
        b = c.structure()
        for v in range(b.n_vertices):
            h = classical_bijections(b, v)
            back = classical_hypermap_to_bipartite(h.hypermap, h.pointed)

            assert h.hypermap.n_edges == b.n_edges
            assert map_code(back.map, pointed=back.pointed) == map_code(b, pointed=v)


def test_classical_forgets_distances(path3):
    geodesic, _ = bipartite_to_hypermap(path3, 0)
    classical = classical_bipartite_to_hypermap(path3, 0)

    assert set(geodesic.labels) == {0, 1, 2}
    assert set(classical.labels) == {0, 1}


def test_classical_dispatch_on_constellations(dark_triangle):
    regular = classical_bijections(dark_triangle, 0)

    assert regular.hypermap.is_p_hypermap(4)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hypermap_bipartite_correspondence_keeps_distances(n):
    for h in hypermaps(n):
        for v in range(h.map.n_vertices):
            bip, corr = hypermap_to_bipartite(h, v)
            back, _ = bipartite_to_hypermap(bip.map, bip.pointed)
            labels = directed_distances(h, v)

            assert bip.labels == graph_distances(bip.map, bip.pointed)
            assert all(bip.labels[corr.vertices[x]] == labels[x] for x in range(h.map.n_vertices))
            assert hypermap_code(back.hypermap, back.labels, back.pointed) == hypermap_code(h, labels, v)


def test_quadrangulation_check(square, bridge):
    assert quadrangulation_check(square, (0, 1, 2, 1))
    assert quadrangulation_check(square, (0, 1, 0, 1))
    with pytest.raises(BijectionError):
        quadrangulation_check(bridge, (0, 1))


def test_bridge_edge_matches_one_triple(bridge):
    h, pointed = blown_up(bridge, 0)

    (triple,) = hypermap_edge_to_mobile_triple(h, pointed)

    assert triple.labels == (1, 2, 3)
    assert h.is_canonical(triple.dart)


def test_parallel_edges_match_triples_at_their_own_corners():
    digon = build_map([2, 3, 0, 1], [1, 0, 3, 2])
    h, pointed = blown_up(digon, 0)
    target = h.map.target(0)

    first, second = hypermap_edge_to_mobile_triple(h, pointed)

    assert [first.dart, second.dart] == [0, 4]
    assert h.map.target(4) == target
    assert first.labels == second.labels == (1, 2, 3)
    assert first.whites[0] == second.whites[0]
    assert first.position != second.position


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rising_edges_match_rising_triples(n):
    for h in hypermaps(n):
        m = h.map
        for v in range(m.n_vertices):
            labels = directed_distances(h, v)
            rising = [e for e in h.canonical_darts if labels[m.target(e)] == labels[m.origin(e)] + 1]

            triples = hypermap_edge_to_mobile_triple(h, v)

            assert [t.dart for t in triples] == rising
            for t in triples:
                i = labels[m.target(t.dart)]
                assert t.labels == (i, i + 1, i + 2)
