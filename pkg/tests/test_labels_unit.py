import itertools

import pytest

from src.services.errors import LabelError
from src.services.labels import (
    CyclicSequence,
    complement,
    completion,
    face_type,
    is_descending,
    is_lukasiewicz,
    local_extrema,
    miermont_labelling,
    opp,
    rises_then_descents,
    right_local_extrema,
    validate_mirror,
    validate_suitable,
    validate_well_labelled,
)
from src.services.maps import bicolor_faces, build_map, directed_distances, map_to_hypermap


@pytest.fixture
def bridge():
    return build_map([0, 1], [1, 0])


@pytest.fixture
def square():
    return build_map([7, 2, 1, 4, 3, 6, 5, 0], [1, 0, 3, 2, 5, 4, 7, 6])


@pytest.fixture
def two_face():
    return bicolor_faces(build_map([2, 3, 0, 1], [1, 0, 3, 2]))


def cyc(*entries):
    return CyclicSequence(tuple(entries))


def test_cyclic_equality_up_to_rotation():
    assert cyc(1, 2, 3) == cyc(3, 1, 2)
    assert cyc(1, 2, 3) != cyc(1, 3, 2)
    assert hash(cyc(1, 2, 3)) == hash(cyc(2, 3, 1))


def test_anchored_equality_is_exact():
    assert CyclicSequence((1, 2, 3), anchored=True) != cyc(2, 3, 1)
    assert CyclicSequence((1, 2, 3), anchored=True) == cyc(1, 2, 3)


def test_empty_sequence_rejected():
    with pytest.raises(LabelError):
        CyclicSequence(())


def test_suitable_labellings(bridge, square):
    assert validate_suitable(bridge, (0, 1))
    assert not validate_suitable(bridge, (0, 0))
    assert validate_suitable(square, (0, 1, 0, 1))


def test_label_count_checked(bridge):
    with pytest.raises(LabelError):
        validate_suitable(bridge, (0,))


def test_well_labelled_two_face(two_face):
    assert validate_well_labelled(two_face, (1, 0))
    assert not validate_well_labelled(two_face, (2, 0))


def test_geodesic_labelling_is_mirror_valid(square):
    h = map_to_hypermap(square)

    for v in range(h.map.n_vertices):
        assert validate_mirror(h, directed_distances(h, v))


def test_local_extrema_bridge(bridge):
    assert local_extrema(bridge, (0, 1)) == (frozenset({0}), frozenset({1}))


def test_local_extrema_path():
    path = build_map([0, 2, 1, 3], [1, 0, 3, 2])

    mins, maxs = local_extrema(path, (0, 1, 0))

    assert maxs == frozenset({1})
    assert mins == frozenset({0, 2})


def test_pointed_vertex_is_unique_right_local_min(square):
    h = map_to_hypermap(square)
    labels = directed_distances(h, 0)

    mins, _ = right_local_extrema(h, labels)

    assert mins == frozenset({0})


def test_face_type_two_face(two_face):
    dark = two_face.dark_faces[0]

    assert face_type(two_face, dark, (1, 0), "ccw") == cyc(1, 0)
    assert face_type(two_face, dark, (1, 0), "cw") == cyc(0, 1)


def test_face_type_quadrangulation(square):
    assert face_type(square, 0, (0, 1, 0, 1)) == cyc(0, 1, 0, 1)


def test_face_type_anchored_start(square):
    seq = face_type(square, 0, (0, 1, 2, 1), "cw", start=2)

    assert seq.anchored
    assert seq.entries == (1, 2, 1, 0)


def test_face_type_rejects_foreign_start(square):
    with pytest.raises(LabelError):
        face_type(square, 0, (0, 1, 0, 1), start=1)


def test_stretched_face_pattern():
    assert rises_then_descents(cyc(0, 1, 2, 3, 2, 1), 3)
    assert rises_then_descents(cyc(2, 1, 0, 1, 2, 3), 3)
    assert not rises_then_descents(cyc(0, 1, 2, 1, 2, 1), 3)


def test_lukasiewicz_and_descending():
    assert is_lukasiewicz(cyc(1, 0, 1, 2))
    assert not is_lukasiewicz(cyc(3, 1))
    assert is_descending(cyc(2, 1, 0))
    assert is_descending(cyc(1, 2))
    assert not is_descending(cyc(1, 1))


def test_lower_completion_of_constant_pair():
    assert completion(cyc(1, 1), "lower") == cyc(1, 0, 1, 0)
    assert complement(cyc(1, 1), "lower") == cyc(0, 0)


def test_upper_complement_examples():
    assert complement(cyc(5, 4), "upper") == cyc(5, 6)
    assert complement(cyc(1, 0), "upper") == cyc(1, 2)


def test_completion_rejects_non_lukasiewicz():
    with pytest.raises(LabelError):
        complement(cyc(3, 0), "upper")


def test_descending_sequences_have_descending_complements():
    for p in range(2, 6):
        seq = CyclicSequence(tuple(range(p - 1, -1, -1)))
        comp = complement(seq, "upper")
        assert is_descending(comp)
        assert len(comp) == p


def lukasiewicz_sequences(max_len, labels):
    for r in range(1, max_len + 1):
        for entries in itertools.product(labels, repeat=r):
            seq = CyclicSequence(entries)
            if is_lukasiewicz(seq):
                yield seq


def test_complements_are_inverse():
    for seq in lukasiewicz_sequences(5, range(-3, 4)):
        upper = complement(seq, "upper")
        assert is_lukasiewicz(upper)
        assert complement(upper, "lower") == seq
        assert len(completion(seq, "upper")) == len(seq) + len(upper)


@pytest.mark.slow
def test_complements_are_inverse_exhaustive():
    for seq in lukasiewicz_sequences(8, range(-3, 4)):
        assert complement(complement(seq, "upper"), "lower") == seq


def test_opp_negates():
    assert opp((0, 1, -2)) == (0, -1, 2)


def test_miermont_labelling_on_square(square):
    assert miermont_labelling(square, (0, 1, 2, 1))
    assert miermont_labelling(square, (0, 1, 0, 1))
    assert miermont_labelling(square, (1, 2, 1, 0))
