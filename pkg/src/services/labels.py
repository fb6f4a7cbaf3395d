"""
Labels Module
This module provides the labelling disciplines of maps and hypermaps, their local
extrema, face types and the calculus of Łukasiewicz cyclic sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import networkx as nx

from src.services.errors import LabelError
from src.services.maps import DartMap, Hypermap

Labelling = tuple[int, ...]


def _check_size(m: DartMap, labels: Sequence[int]) -> None:
    if len(labels) != m.n_vertices:
        raise LabelError(f"{len(labels)} labels for {m.n_vertices} vertices")


@dataclass(frozen=True, eq=False)
class CyclicSequence:
    """
    A cyclic list of integers.

    Equality is up to rotation unless one side is anchored at a distinguished start.

    Attributes:
        entries (tuple[int, ...]): The list read from its start.
        anchored (bool): Whether the start is distinguished.
    """

    entries: tuple[int, ...]
    anchored: bool = False

    def __post_init__(self):
        if not self.entries:
            raise LabelError("cyclic sequences are nonempty")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def rotations(self) -> list[tuple[int, ...]]:
        e = self.entries
        return [e[k:] + e[:k] for k in range(len(e))]

    def normal_form(self) -> tuple[int, ...]:
        return min(self.rotations())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CyclicSequence):
            return NotImplemented
        if self.anchored or other.anchored:
            return self.entries == other.entries
        return len(self) == len(other) and other.entries in self.rotations()

    def __hash__(self) -> int:
        return hash(self.normal_form())

    def __repr__(self) -> str:
        return f"CyclicSequence({self.entries}{', anchored' if self.anchored else ''})"

    def steps(self) -> list[int]:
        e = self.entries
        return [e[(k + 1) % len(e)] - e[k] for k in range(len(e))]

    def reversed(self) -> CyclicSequence:
        return CyclicSequence(tuple(reversed(self.entries)))

    def shifted(self, delta: int) -> CyclicSequence:
        return CyclicSequence(tuple(x + delta for x in self.entries), self.anchored)


def is_lukasiewicz(seq: CyclicSequence) -> bool:
    return all(step >= -1 for step in seq.steps())


def is_descending(seq: CyclicSequence) -> bool:
    """Exactly one rise and every other step equal to -1."""
    steps = seq.steps()
    return sum(1 for s in steps if s != -1) == 1 and all(s >= -1 for s in steps)


def rises_then_descents(seq: CyclicSequence, s: int) -> bool:
    """Whether ``seq`` reads ``i, i+1, ..., i+s, i+s-1, ..., i+1`` up to rotation."""
    if len(seq) != 2 * s:
        return False
    low = min(seq.entries)
    pattern = tuple(low + k for k in range(s + 1)) + tuple(low + k for k in range(s - 1, 0, -1))
    return CyclicSequence(pattern) == CyclicSequence(seq.entries)


def _completion_marks(seq: CyclicSequence, direction: str) -> list[tuple[int, bool]]:
    if direction not in ("upper", "lower"):
        raise LabelError(f"unknown completion direction {direction!r}")
    if not is_lukasiewicz(seq):
        raise LabelError(f"{seq.entries} is not a Łukasiewicz sequence")
    shift = 1 if direction == "upper" else -1
    e = seq.entries
    out: list[tuple[int, bool]] = []
    for k, i in enumerate(e):
        j = e[(k + 1) % len(e)]
        out.append((i, False))
        if j >= i:
            out.extend((v, True) for v in range(i + shift, j + shift + 1))
    return out


def completion(seq: CyclicSequence, direction: str) -> CyclicSequence:
    """
    Insert a rising run between every pair of consecutive entries ``i, j`` with ``j >= i``.

    Args:
        seq (CyclicSequence): A Łukasiewicz sequence.
        direction (str): ``upper`` inserts ``i+1..j+1``, ``lower`` inserts ``i-1..j-1``.

    Returns:
        CyclicSequence: The completed sequence.
    """
    return CyclicSequence(tuple(v for v, _ in _completion_marks(seq, direction)))


def complement(seq: CyclicSequence, direction: str) -> CyclicSequence:
    """
    The inserted entries of the completion, taken in reverse order.

    Args:
        seq (CyclicSequence): A Łukasiewicz sequence.
        direction (str): ``upper`` or ``lower``.

    Returns:
        CyclicSequence: The complement, again a Łukasiewicz sequence.
    """
    inserted = [v for v, new in _completion_marks(seq, direction) if new]
    return CyclicSequence(tuple(reversed(inserted)))


def opp(labels: Sequence[int]) -> Labelling:
    return tuple(-x for x in labels)


def validate_suitable(m: DartMap, labels: Sequence[int]) -> bool:
    """
    Check that every edge joins labels differing by exactly 1.

    Args:
        m (DartMap): The map.
        labels (Sequence[int]): One label per vertex.

    Returns:
        bool: Whether the labelling is suitable.
    """
    _check_size(m, labels)
    return all(
        abs(labels[m.origin(d)] - labels[m.target(d)]) == 1 for d in range(m.n_darts)
    )


def validate_well_labelled(h: Hypermap, labels: Sequence[int]) -> bool:
    """Along every canonical dart ``a -> b``, ``l(b) >= l(a) - 1``."""
    _check_size(h.map, labels)
    m = h.map
    return all(
        labels[m.target(e)] >= labels[m.origin(e)] - 1 for e in h.canonical_darts
    )


def validate_mirror(h: Hypermap, labels: Sequence[int]) -> bool:
    """Along every canonical dart ``a -> b``, ``l(b) <= l(a) + 1``."""
    _check_size(h.map, labels)
    m = h.map
    return all(
        labels[m.target(e)] <= labels[m.origin(e)] + 1 for e in h.canonical_darts
    )


def local_extrema(m: DartMap, labels: Sequence[int]) -> tuple[frozenset[int], frozenset[int]]:
    """
    Vertices whose neighbours all carry larger labels, and those whose neighbours all carry smaller ones.

    Args:
        m (DartMap): The map.
        labels (Sequence[int]): One label per vertex.

    Returns:
        tuple[frozenset[int], frozenset[int]]: Local minima and local maxima.
    """
    _check_size(m, labels)
    g = m.graph()
    mins, maxs = set(), set()
    for v in range(m.n_vertices):
        neighbours = [labels[u] for u in nx.all_neighbors(g, v)]
        if all(x > labels[v] for x in neighbours):
            mins.add(v)
        if all(x < labels[v] for x in neighbours):
            maxs.add(v)
    return frozenset(mins), frozenset(maxs)


def right_neighbours(h: Hypermap, v: int) -> list[int]:
    m = h.map
    return [m.target(d) for d in m.vertices[v] if not h.is_canonical(d)]


def right_local_extrema(h: Hypermap, labels: Sequence[int]) -> tuple[frozenset[int], frozenset[int]]:
    """
    Right local minima and maxima.

    A right neighbour of ``u`` is the origin of a canonical dart ending at ``u``.

    Args:
        h (Hypermap): The hypermap.
        labels (Sequence[int]): One label per vertex.

    Returns:
        tuple[frozenset[int], frozenset[int]]: Right local minima and right local maxima.
    """
    _check_size(h.map, labels)
    mins, maxs = set(), set()
    for v in range(h.map.n_vertices):
        neighbours = [labels[u] for u in right_neighbours(h, v)]
        if all(x >= labels[v] for x in neighbours):
            mins.add(v)
        if all(x <= labels[v] for x in neighbours):
            maxs.add(v)
    return frozenset(mins), frozenset(maxs)


def face_type(
    m: DartMap | Hypermap,
    face: int,
    labels: Sequence[int],
    direction: str = "cw",
    start: int | None = None,
) -> CyclicSequence:
    """
    Labels read around a face.

    Args:
        m (DartMap | Hypermap): The map holding the face.
        face (int): Face index.
        labels (Sequence[int]): One label per vertex.
        direction (str): ``cw`` follows phi, ``ccw`` follows its inverse.
        start (int | None): A dart of the face whose origin opens an anchored sequence.

    Returns:
        CyclicSequence: The cw-type or ccw-type of the face.
    """
    base = m.map if isinstance(m, Hypermap) else m
    _check_size(base, labels)
    if direction not in ("cw", "ccw"):
        raise LabelError(f"unknown direction {direction!r}")
    first = base.faces[face][0] if start is None else start
    if base.face_of[first] != face:
        raise LabelError("start dart does not lie on the face")
    perm = base.phi if direction == "cw" else base.phi_inv
    darts = base.walk(perm, first)
    return CyclicSequence(tuple(labels[base.origin(d)] for d in darts), start is not None)


def miermont_labelling(q: DartMap, labels: Sequence[int]) -> bool:
    """
    Check that a labelling is the distance labelling delayed at its local minima.

    Args:
        q (DartMap): A quadrangulation.
        labels (Sequence[int]): One label per vertex.

    Returns:
        bool: Whether ``l(v) = min_u (dist(u, v) + l(u))`` over the local minima ``u``.
    """
    _check_size(q, labels)
    if any(q.face_degree(f) != 4 for f in range(q.n_faces)):
        raise LabelError("not a quadrangulation")
    sources, _ = local_extrema(q, labels)
    g = q.graph()
    lengths = {u: nx.single_source_shortest_path_length(g, u) for u in sources}
    return all(
        labels[v] == min(lengths[u][v] + labels[u] for u in sources)
        for v in range(q.n_vertices)
    )
