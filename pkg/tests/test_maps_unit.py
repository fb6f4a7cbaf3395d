import pytest

from src.services.errors import MapError
from src.services.maps import (
    DartMap,
    Hypermap,
    RootedPointedMap,
    bicolor_faces,
    build_map,
    collapse_stars,
    constellation_check,
    delete_edges,
    directed_distances,
    graph_distances,
    hypermap_code,
    hypermap_from_hyperdarts,
    hypermap_to_map,
    insert_edge,
    map_code,
    map_to_hypermap,
    rooted_code,
    star_representation,
)


@pytest.fixture
def loop():
    return build_map([1, 0], [1, 0])


@pytest.fixture
def bridge():
    return build_map([0, 1], [1, 0])


@pytest.fixture
def square():
    # darts 0/1 on edge ab, 2/3 on bc, 4/5 on cd, 6/7 on da
    return build_map([7, 2, 1, 4, 3, 6, 5, 0], [1, 0, 3, 2, 5, 4, 7, 6])


@pytest.fixture
def double_edge():
    return build_map([2, 3, 0, 1], [1, 0, 3, 2])


@pytest.fixture
def path2():
    return build_map([0, 2, 1, 3], [1, 0, 3, 2])


@pytest.fixture
def dark_triangle():
    return hypermap_from_hyperdarts([0, 1, 2], [1, 2, 0]).hypermap


def test_loop_counts(loop):
    assert (loop.n_vertices, loop.n_edges, loop.n_faces, loop.genus) == (1, 1, 2, 0)


def test_bridge_counts(bridge):
    assert (bridge.n_vertices, bridge.n_edges, bridge.n_faces, bridge.genus) == (2, 1, 1, 0)


def test_disconnected_map_rejected():
    with pytest.raises(MapError):
        build_map([1, 0, 3, 2], [1, 0, 3, 2])


def test_alpha_fixed_point_rejected():
    with pytest.raises(MapError):
        build_map([0, 1], [0, 1])


def test_size_mismatch_rejected():
    with pytest.raises(MapError):
        build_map([0, 1, 2], [1, 0])


def test_torus_genus():
    # one vertex, two loops interleaved
    m = build_map([2, 3, 1, 0], [1, 0, 3, 2])

    assert m.genus == 1


def test_json_is_one_based(bridge):
    payload = bridge.to_json(pointed_vertex=1)

    assert payload == {"n_darts": 2, "sigma": [1, 2], "alpha": [2, 1], "pointed_vertex": 1}
    assert DartMap.from_json(payload) == bridge


def test_text_form_lists_vertex_orbits(bridge):
    assert bridge.text_form() == "v1: 1:2\nv2: 2:1"


def test_bicolor_double_edge(double_edge):
    h = bicolor_faces(double_edge)

    assert [h.map.face_degree(f) for f in h.dark_faces] == [2]
    assert [h.map.face_degree(f) for f in h.light_faces] == [2]
    assert h.is_canonical(0)


def test_bicolor_loop(loop):
    h = bicolor_faces(loop)

    assert len(h.dark_faces) == 1 and len(h.light_faces) == 1
    assert h.map.face_degree(h.dark_faces[0]) == 1


def test_bicolor_rejects_odd_degree(path2):
    with pytest.raises(MapError):
        bicolor_faces(path2)


def test_bicolor_override(double_edge):
    h = bicolor_faces(double_edge, dark_dart=1)

    assert not h.is_canonical(0)
    assert h.is_canonical(1)


def test_hypermap_colouring_must_be_proper(double_edge):
    with pytest.raises(MapError):
        Hypermap(double_edge, (True, True))


def test_dark_and_light_degrees_balance(square):
    h = map_to_hypermap(square)
    m = h.map

    dark = sum(m.face_degree(f) for f in h.dark_faces)
    light = sum(m.face_degree(f) for f in h.light_faces)

    assert dark == light == h.n_edges


def test_rooted_pointed_map_requires_canonical_root(double_edge):
    h = bicolor_faces(double_edge)

    RootedPointedMap(h, 0, 0)
    with pytest.raises(MapError):
        RootedPointedMap(h, 1, 0)


def test_star_of_dark_two_face(double_edge):
    h = bicolor_faces(double_edge)

    star, canonical = star_representation(h)

    assert len(star.black) == 1
    black = next(iter(star.black))
    assert star.map.degree(black) == 2
    assert len(star.white_vertices) == 2
    assert canonical == h.canonical_darts


def test_star_of_loop_hypermap(loop):
    h = bicolor_faces(loop)

    star, _ = star_representation(h)

    assert star.map.n_edges == 1
    assert star.map.n_vertices == 2


@pytest.mark.parametrize("name", ["loop", "bridge", "square", "double_edge"])
def test_star_round_trip_and_genus(name, request):
    h = map_to_hypermap(request.getfixturevalue(name))

    star, _ = star_representation(h)
    back = collapse_stars(star).hypermap

    assert star.map.genus == h.map.genus == 0
    assert hypermap_code(back) == hypermap_code(h)


def test_map_to_hypermap_round_trip(square):
    h = map_to_hypermap(square)

    assert h.is_p_hypermap(2)
    assert hypermap_to_map(h) == square


def test_bridge_blow_up_is_double_edge(bridge, double_edge):
    assert hypermap_code(map_to_hypermap(bridge)) == hypermap_code(bicolor_faces(double_edge))


def test_graph_distances(bridge, loop, square):
    assert graph_distances(bridge, 0) == (0, 1)
    assert graph_distances(bridge, 1) == (1, 0)
    assert graph_distances(loop, 0) == (0,)
    assert graph_distances(square, 0) == (0, 1, 2, 1)


def test_directed_distances_on_two_face(double_edge):
    h = bicolor_faces(double_edge)

    assert directed_distances(h, 0) == (0, 1)
    assert directed_distances(h, 1) == (1, 0)


def test_directed_distances_around_dark_triangle(dark_triangle):
    h = dark_triangle
    m = h.map
    e = h.canonical_darts[0]

    dist = directed_distances(h, m.origin(e))

    assert dist[m.origin(e)] == 0
    assert dist[m.target(e)] == 1
    assert dist[m.target(m.phi[e])] == 2


def test_directed_distances_match_graph_distances_for_maps(square):
    h = map_to_hypermap(square)
    m = h.map

    for v in range(square.n_vertices):
        hv = m.origin(2 * square.vertices[v][0])
        directed = directed_distances(h, hv)
        plain = graph_distances(square, v)
        assert all(
            directed[m.origin(2 * d)] == plain[square.origin(d)]
            for d in range(square.n_darts)
        )


def test_constellation_check_bipartite(square):
    coloring = constellation_check(map_to_hypermap(square), 2)

    assert coloring.ok
    assert sorted(set(coloring.colors)) == [0, 1]


def test_constellation_check_loop_fails(loop):
    coloring = constellation_check(map_to_hypermap(loop), 2)

    assert not coloring.ok
    assert coloring.witness_face is not None


def test_constellation_check_triangle(dark_triangle):
    coloring = constellation_check(dark_triangle, 3)

    assert coloring.ok
    assert sorted(coloring.colors) == [0, 1, 2]


def test_canonical_code_ignores_numbering(square):
    order = [3, 0, 5, 6, 1, 2, 7, 4]
    relabelled = square.relabel(order)

    assert map_code(relabelled) == map_code(square)
    assert rooted_code(relabelled, 1) == rooted_code(square, 0)


def test_canonical_code_sees_labels(square):
    assert map_code(square, labels=(0, 1, 0, 1)) != map_code(square, labels=(0, 1, 2, 1))


def test_insert_and_delete_edge(square):
    bigger, x, y = insert_edge(square, 0, 4)

    assert bigger.n_edges == 5
    assert bigger.origin(x) == square.origin(0)
    assert bigger.origin(y) == square.origin(4)
    assert bigger.genus == 0

    smaller, _ = delete_edges(bigger, [x])
    assert map_code(smaller) == map_code(square)
