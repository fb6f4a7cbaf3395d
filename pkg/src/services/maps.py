"""
Maps Module
This module provides planar maps and hypermaps encoded as rotation systems on darts.

Darts are 0-based integers. ``sigma`` turns counterclockwise around the origin of a
dart, ``alpha`` pairs the two darts of an edge and ``phi = sigma∘alpha`` walks the face
lying on the right of a dart, in clockwise order. The corner of a dart ``d`` is the
sector of ``origin(d)`` just counterclockwise before ``d``; it lies in ``face(d)``.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import networkx as nx

from src.services.errors import MapError


logger = logging.getLogger(__name__)


def _orbits(perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(perm)
    orbits = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = []
        d = start
        while not seen[d]:
            seen[d] = True
            orbit.append(d)
            d = perm[d]
        orbits.append(tuple(orbit))
    return tuple(orbits)


def _inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for d, image in enumerate(perm):
        inv[image] = d
    return tuple(inv)


def perm_from_cycles(n: int, cycles: Iterable[Sequence[int]]) -> tuple[int, ...]:
    perm = list(range(n))
    for cycle in cycles:
        for k, d in enumerate(cycle):
            perm[d] = cycle[(k + 1) % len(cycle)]
    return tuple(perm)


@dataclass(frozen=True, eq=False)
class DartMap:
    """
    A connected map given by its rotation system.

    Attributes:
        sigma (tuple[int, ...]): Counterclockwise successor of each dart around its origin.
        alpha (tuple[int, ...]): The opposite dart of each dart.
    """

    sigma: tuple[int, ...]
    alpha: tuple[int, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DartMap):
            return NotImplemented
        return self.sigma == other.sigma and self.alpha == other.alpha

    def __hash__(self) -> int:
        return hash((self.sigma, self.alpha))

    @property
    def n_darts(self) -> int:
        return len(self.sigma)

    @cached_property
    def phi(self) -> tuple[int, ...]:
        return tuple(self.sigma[self.alpha[d]] for d in range(self.n_darts))

    @cached_property
    def sigma_inv(self) -> tuple[int, ...]:
        return _inverse(self.sigma)

    @cached_property
    def phi_inv(self) -> tuple[int, ...]:
        return _inverse(self.phi)

    @cached_property
    def vertices(self) -> tuple[tuple[int, ...], ...]:
        if not self.n_darts:
            return ((),)
        return _orbits(self.sigma)

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        if not self.n_darts:
            return ((),)
        return _orbits(self.phi)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        table = [0] * self.n_darts
        for v, orbit in enumerate(self.vertices):
            for d in orbit:
                table[d] = v
        return tuple(table)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        table = [0] * self.n_darts
        for f, orbit in enumerate(self.faces):
            for d in orbit:
                table[d] = f
        return tuple(table)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return self.n_darts // 2

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def genus(self) -> int:
        euler = self.n_vertices - self.n_edges + self.n_faces
        return (2 - euler) // 2

    def origin(self, d: int) -> int:
        return self.vertex_of[d]

    def target(self, d: int) -> int:
        return self.vertex_of[self.alpha[d]]

    def degree(self, v: int) -> int:
        return len(self.vertices[v])

    def face_degree(self, f: int) -> int:
        return len(self.faces[f])

    def face_vertices(self, f: int) -> tuple[int, ...]:
        """Origins of the face darts in clockwise order."""
        return tuple(self.vertex_of[d] for d in self.faces[f])

    def walk(self, perm: Sequence[int], start: int) -> list[int]:
        out = [start]
        d = perm[start]
        while d != start:
            out.append(d)
            d = perm[d]
        return out

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n_vertices))
        for d in range(self.n_darts):
            if d < self.alpha[d]:
                g.add_edge(self.origin(d), self.target(d), key=d)
        return g

    def relabel(self, order: Sequence[int]) -> DartMap:
        """Renumber darts so that ``order[k]`` becomes dart ``k``."""
        pos = {d: k for k, d in enumerate(order)}
        return DartMap(
            tuple(pos[self.sigma[d]] for d in order),
            tuple(pos[self.alpha[d]] for d in order),
        )

    def to_json(self, **extra) -> dict:
        payload = {
            "n_darts": self.n_darts,
            "sigma": [d + 1 for d in self.sigma],
            "alpha": [d + 1 for d in self.alpha],
        }
        payload.update({k: v for k, v in extra.items() if v is not None})
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> DartMap:
        if len(payload["sigma"]) != payload["n_darts"]:
            raise MapError("n_darts does not match the permutation size")
        return build_map(
            [d - 1 for d in payload["sigma"]], [d - 1 for d in payload["alpha"]]
        )

    def text_form(self) -> str:
        """One line per vertex orbit, each dart written with its opposite, 1-based."""
        lines = []
        for v, orbit in enumerate(self.vertices):
            cells = " ".join(f"{d + 1}:{self.alpha[d] + 1}" for d in orbit)
            lines.append(f"v{v + 1}: {cells}".rstrip())
        return "\n".join(lines)


def build_map(sigma: Sequence[int], alpha: Sequence[int]) -> DartMap:
    """
    Validate a rotation system and build the map.

    Args:
        sigma (Sequence[int]): Vertex rotation, a permutation of the darts.
        alpha (Sequence[int]): Edge pairing, a fixed-point-free involution.

    Returns:
        DartMap: The connected map with cached vertices, faces and genus.
    """
    n = len(sigma)
    if len(alpha) != n:
        raise MapError(f"size mismatch: sigma has {n} darts, alpha {len(alpha)}")
    if sorted(sigma) != list(range(n)):
        raise MapError("sigma is not a permutation")
    if sorted(alpha) != list(range(n)):
        raise MapError("alpha is not a permutation")
    for d in range(n):
        if alpha[d] == d:
            raise MapError(f"alpha has a fixed point at dart {d + 1}")
        if alpha[alpha[d]] != d:
            raise MapError(f"alpha is not an involution at dart {d + 1}")
    if n:
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from((d, sigma[d]) for d in range(n))
        g.add_edges_from((d, alpha[d]) for d in range(n))
        if not nx.is_connected(g):
            raise MapError("map is disconnected")
    return DartMap(tuple(sigma), tuple(alpha))


def vertex_map() -> DartMap:
    """The map with a single vertex and no edge."""
    return DartMap((), ())


@dataclass(frozen=True, eq=False)
class Hypermap:
    """
    A face-bicoloured Eulerian map.

    Attributes:
        map (DartMap): The underlying map.
        dark (tuple[bool, ...]): Colour of every face, indexed like ``map.faces``.
    """

    map: DartMap
    dark: tuple[bool, ...]

    def __post_init__(self):
        if len(self.dark) != self.map.n_faces:
            raise MapError("one colour per face is required")
        for d in range(self.map.n_darts):
            f, g = self.map.face_of[d], self.map.face_of[self.map.alpha[d]]
            if self.dark[f] == self.dark[g]:
                raise MapError(f"edge of dart {d + 1} does not separate a dark and a light face")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypermap):
            return NotImplemented
        return self.map == other.map and self.dark == other.dark

    def __hash__(self) -> int:
        return hash((self.map, self.dark))

    def is_canonical(self, d: int) -> bool:
        return self.dark[self.map.face_of[d]]

    @cached_property
    def canonical_darts(self) -> tuple[int, ...]:
        return tuple(d for d in range(self.map.n_darts) if self.is_canonical(d))

    @cached_property
    def dark_faces(self) -> tuple[int, ...]:
        return tuple(f for f, dark in enumerate(self.dark) if dark)

    @cached_property
    def light_faces(self) -> tuple[int, ...]:
        return tuple(f for f, dark in enumerate(self.dark) if not dark)

    @property
    def n_edges(self) -> int:
        return self.map.n_edges

    def is_p_hypermap(self, p: int) -> bool:
        return all(self.map.face_degree(f) == p for f in self.dark_faces)

    def to_json(self, **extra) -> dict:
        colors = ["dark" if self.dark[self.map.face_of[d]] else "light" for d in range(self.map.n_darts)]
        return self.map.to_json(colors=colors, **extra)

    @classmethod
    def from_json(cls, payload: dict) -> Hypermap:
        m = DartMap.from_json(payload)
        if "colors" not in payload:
            return bicolor_faces(m)
        dark = [False] * m.n_faces
        for d, color in enumerate(payload["colors"]):
            dark[m.face_of[d]] = color == "dark"
        return cls(m, tuple(dark))


@dataclass(frozen=True)
class RootedPointedMap:
    """
    A map or hypermap with a root dart and a pointed vertex.

    Attributes:
        map (DartMap | Hypermap): The underlying object.
        root_dart (int): The root; canonical for hypermaps.
        pointed_vertex (int): The marked vertex.
    """

    map: DartMap | Hypermap
    root_dart: int
    pointed_vertex: int

    def __post_init__(self):
        base = self.map.map if isinstance(self.map, Hypermap) else self.map
        if not 0 <= self.root_dart < base.n_darts:
            raise MapError(f"root dart {self.root_dart + 1} out of range")
        if not 0 <= self.pointed_vertex < base.n_vertices:
            raise MapError(f"pointed vertex {self.pointed_vertex + 1} out of range")
        if isinstance(self.map, Hypermap) and not self.map.is_canonical(self.root_dart):
            raise MapError("hypermap root dart must have its dark face on the right")


def bicolor_faces(m: DartMap, dark_dart: int = 0) -> Hypermap:
    """
    Properly bicolour the faces of an Eulerian map.

    Args:
        m (DartMap): A map whose vertex degrees are all even.
        dark_dart (int): A dart whose face is declared dark.

    Returns:
        Hypermap: The coloured map.
    """
    for v in range(m.n_vertices):
        if m.degree(v) % 2:
            raise MapError(f"vertex {v + 1} has odd degree {m.degree(v)}")
    g = nx.Graph()
    g.add_nodes_from(range(m.n_faces))
    for d in range(m.n_darts):
        f, h = m.face_of[d], m.face_of[m.alpha[d]]
        if f == h:
            raise MapError("an edge has the same face on both sides")
        g.add_edge(f, h)
    try:
        coloring = nx.bipartite.color(g)
    except nx.NetworkXError as err:
        raise MapError("faces admit no proper bicolouring") from err
    seed = coloring[m.face_of[dark_dart]]
    return Hypermap(m, tuple(coloring[f] == seed for f in range(m.n_faces)))


@dataclass(frozen=True, eq=False)
class StarMap:
    """
    A bipartite map with black star centres.

    Attributes:
        map (DartMap): The star map itself.
        black (frozenset[int]): Vertex ids of the black vertices.
    """

    map: DartMap
    black: frozenset[int]

    def is_white_dart(self, d: int) -> bool:
        return self.map.vertex_of[d] not in self.black

    @cached_property
    def white_darts(self) -> tuple[int, ...]:
        return tuple(d for d in range(self.map.n_darts) if self.is_white_dart(d))

    @cached_property
    def white_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.map.n_vertices) if v not in self.black)


def star_representation(h: Hypermap) -> tuple[StarMap, tuple[int, ...]]:
    """
    Replace every dark face by a black star centre.

    Args:
        h (Hypermap): The hypermap.

    Returns:
        tuple[StarMap, tuple[int, ...]]: The star map and, for each star edge ``k``, the
        canonical hypermap dart it comes from. Star edge ``k`` has its white dart ``2k`` at
        the origin of that dart and its black dart ``2k + 1``.
    """
    m = h.map
    canonical = h.canonical_darts
    index = {e: k for k, e in enumerate(canonical)}
    n = 2 * len(canonical)
    sigma = [0] * n
    alpha = [0] * n
    for k, e in enumerate(canonical):
        s, t = 2 * k, 2 * k + 1
        alpha[s], alpha[t] = t, s
        sigma[s] = 2 * index[m.sigma[m.sigma[e]]]
        sigma[t] = 2 * index[m.phi_inv[e]] + 1
    star = DartMap(tuple(sigma), tuple(alpha))
    black = frozenset(star.vertex_of[2 * k + 1] for k in range(len(canonical)))
    return StarMap(star, black), canonical


@dataclass(frozen=True)
class CollapsedStars:
    """
    Result of collapsing a star map.

    Attributes:
        hypermap (Hypermap): The hypermap.
        canonical_of (dict[int, int]): Star white dart to canonical hypermap dart.
        vertex_of (dict[int, int]): Star white vertex to hypermap vertex.
        dark_face_of (dict[int, int]): Star black vertex to dark face.
        light_face_of (dict[int, int]): Star face to light face.
    """

    hypermap: Hypermap
    canonical_of: dict[int, int] = field(default_factory=dict)
    vertex_of: dict[int, int] = field(default_factory=dict)
    dark_face_of: dict[int, int] = field(default_factory=dict)
    light_face_of: dict[int, int] = field(default_factory=dict)


def collapse_stars(star: StarMap) -> CollapsedStars:
    """
    Rebuild the hypermap whose star representation is ``star``.

    Each white star dart ``w`` yields a canonical dart ``e(w) = 2i`` and the dart
    ``ebar(w) = 2i + 1`` just before it around the same vertex.

    Args:
        star (StarMap): A bipartite map with its black vertices marked.

    Returns:
        CollapsedStars: The hypermap with its vertex and face correspondences.
    """
    s = star.map
    whites = star.white_darts
    if not whites:
        raise MapError("star map has no edge")
    for w in whites:
        if s.vertex_of[s.alpha[w]] not in star.black:
            raise MapError("star map is not bipartite between white and black vertices")
    index = {w: i for i, w in enumerate(whites)}
    n = 2 * len(whites)
    sigma = [0] * n
    alpha = [0] * n
    for w, i in index.items():
        e, ebar = 2 * i, 2 * i + 1
        sigma[ebar] = e
        sigma[e] = 2 * index[s.sigma[w]] + 1
        partner = s.alpha[s.sigma_inv[s.alpha[w]]]
        alpha[e] = 2 * index[partner] + 1
        alpha[2 * index[partner] + 1] = e
    m = DartMap(tuple(sigma), tuple(alpha))
    dark = [False] * m.n_faces
    for i in range(len(whites)):
        dark[m.face_of[2 * i]] = True
    h = Hypermap(m, tuple(dark))
    return CollapsedStars(
        hypermap=h,
        canonical_of={w: 2 * i for w, i in index.items()},
        vertex_of={s.vertex_of[w]: m.vertex_of[2 * i] for w, i in index.items()},
        dark_face_of={s.vertex_of[s.alpha[w]]: m.face_of[2 * i] for w, i in index.items()},
        light_face_of={s.face_of[w]: m.face_of[2 * i + 1] for w, i in index.items()},
    )


def hypermap_from_hyperdarts(sigma: Sequence[int], alpha: Sequence[int]) -> CollapsedStars:
    """
    Build a hypermap from a white rotation ``sigma`` and a black rotation ``alpha``.

    Hyperdart ``h`` becomes the star edge with white dart ``2h`` and black dart ``2h + 1``.
    """
    n = len(sigma)
    star_sigma = [0] * (2 * n)
    star_alpha = [0] * (2 * n)
    for h in range(n):
        star_sigma[2 * h] = 2 * sigma[h]
        star_sigma[2 * h + 1] = 2 * alpha[h] + 1
        star_alpha[2 * h], star_alpha[2 * h + 1] = 2 * h + 1, 2 * h
    s = build_map(star_sigma, star_alpha)
    black = frozenset(s.vertex_of[2 * h + 1] for h in range(n))
    return collapse_stars(StarMap(s, black))


def map_to_hypermap(m: DartMap) -> Hypermap:
    """
    Blow every edge into a dark face of degree 2.

    Map dart ``d`` becomes the canonical dart ``2d`` of the result.
    """
    n = m.n_darts
    if not n:
        raise MapError("the vertex map has no edge to blow up")
    sigma = [0] * (2 * n)
    alpha = [0] * (2 * n)
    for d in range(n):
        c, nd = 2 * d, 2 * d + 1
        sigma[nd] = c
        sigma[c] = 2 * m.sigma[d] + 1
        alpha[c] = 2 * m.alpha[d] + 1
        alpha[2 * m.alpha[d] + 1] = c
    h = DartMap(tuple(sigma), tuple(alpha))
    dark = [False] * h.n_faces
    for d in range(n):
        dark[h.face_of[2 * d]] = True
    return Hypermap(h, tuple(dark))


def hypermap_to_map(h: Hypermap) -> DartMap:
    """
    Contract the dark 2-faces of a 2-hypermap back into edges.

    Canonical darts, in increasing order, become the map darts.
    """
    if not h.is_p_hypermap(2):
        raise MapError("only hypermaps with dark faces of degree 2 come from maps")
    m = h.map
    canonical = h.canonical_darts
    index = {e: k for k, e in enumerate(canonical)}
    sigma = [index[m.sigma[m.sigma[e]]] for e in canonical]
    alpha = [index[m.phi[e]] for e in canonical]
    return DartMap(tuple(sigma), tuple(alpha))


def graph_distances(m: DartMap, v: int) -> tuple[int, ...]:
    """
    Graph distances from ``v``.

    Args:
        m (DartMap): The map.
        v (int): Source vertex.

    Returns:
        tuple[int, ...]: Distance of every vertex.
    """
    lengths = nx.single_source_shortest_path_length(m.graph(), v)
    if len(lengths) != m.n_vertices:
        raise MapError("map is disconnected")
    return tuple(lengths[u] for u in range(m.n_vertices))


def canonical_digraph(h: Hypermap) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(h.map.n_vertices))
    for e in h.canonical_darts:
        g.add_edge(h.map.origin(e), h.map.target(e))
    return g


def directed_distances(h: Hypermap, v: int) -> tuple[int, ...]:
    """
    Lengths of shortest paths from ``v`` in the canonical orientation.

    Args:
        h (Hypermap): The hypermap; edges are directed with their dark face on the right.
        v (int): The pointed vertex.

    Returns:
        tuple[int, ...]: The geodesic labelling.
    """
    lengths = nx.single_source_shortest_path_length(canonical_digraph(h), v)
    if len(lengths) != h.map.n_vertices:
        raise MapError("a vertex is unreachable in the canonical orientation")
    return tuple(lengths[u] for u in range(h.map.n_vertices))


@dataclass(frozen=True)
class Coloring:
    """
    Outcome of a constellation colouring attempt.

    Attributes:
        colors (tuple[int, ...] | None): Colour of every vertex when one exists.
        witness_face (int | None): A dark face that defeats the colouring otherwise.
    """

    colors: tuple[int, ...] | None
    witness_face: int | None = None

    @property
    def ok(self) -> bool:
        return self.colors is not None


def constellation_check(h: Hypermap, p: int) -> Coloring:
    """
    Look for a vertex colouring in ``Z/p`` that reads ``0, 1, ..., p-1`` clockwise
    around every dark face.

    Args:
        h (Hypermap): The hypermap.
        p (int): The constellation degree.

    Returns:
        Coloring: The colouring, or a witness dark face.
    """
    m = h.map
    for f in h.dark_faces:
        if m.face_degree(f) != p:
            return Coloring(None, f)
    colors: list[int | None] = [None] * m.n_vertices
    colors[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for d in m.vertices[u]:
            if h.is_canonical(d):
                w, c = m.target(d), (colors[u] + 1) % p
            else:
                w, c = m.target(d), (colors[u] - 1) % p
            if colors[w] is None:
                colors[w] = c
                queue.append(w)
    for e in h.canonical_darts:
        if (colors[m.origin(e)] + 1) % p != colors[m.target(e)]:
            return Coloring(None, m.face_of[e])
    return Coloring(tuple(colors))


def bfs_order(m: DartMap, root: int) -> list[int]:
    """Darts in the breadth-first order opened by ``root``, visiting ``alpha`` before ``sigma``."""
    order = [root]
    seen = {root}
    k = 0
    while k < len(order):
        d = order[k]
        for nxt in (m.alpha[d], m.sigma[d]):
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
        k += 1
    return order


Decoration = Callable[[int], Hashable]


def rooted_code(m: DartMap, root: int, decorate: Decoration | None = None) -> tuple:
    """Isomorphism invariant of a rooted, optionally decorated map."""
    order = bfs_order(m, root)
    pos = {d: k for k, d in enumerate(order)}
    return tuple(
        (pos[m.sigma[d]], pos[m.alpha[d]], decorate(d) if decorate else None)
        for d in order
    )


def canonical_code(
    m: DartMap, decorate: Decoration | None = None, roots: Iterable[int] | None = None
) -> tuple:
    """
    Smallest rooted code over all admissible roots.

    Args:
        m (DartMap): The map.
        decorate (Decoration | None): Per-dart data that isomorphisms must preserve.
        roots (Iterable[int] | None): Candidate roots, every dart by default.

    Returns:
        tuple: Equal for two maps exactly when they are isomorphic.
    """
    if not m.n_darts:
        return ((None, None, decorate(0) if decorate else None),) if decorate else ()
    candidates = range(m.n_darts) if roots is None else roots
    return min(rooted_code(m, r, decorate) for r in candidates)


def hypermap_code(
    h: Hypermap,
    labels: Sequence[int] | None = None,
    pointed: int | None = None,
    root: int | None = None,
) -> tuple:
    """Canonical code of a hypermap with optional vertex labels, pointed vertex and root."""
    m = h.map

    def decorate(d: int) -> Hashable:
        v = m.origin(d)
        return (
            h.is_canonical(d),
            labels[v] if labels is not None else None,
            v == pointed if pointed is not None else None,
        )

    if root is not None:
        return rooted_code(m, root, decorate)
    return canonical_code(m, decorate, h.canonical_darts)


def map_code(
    m: DartMap,
    labels: Sequence[int] | None = None,
    pointed: int | None = None,
    root: int | None = None,
) -> tuple:
    """Canonical code of a map with optional vertex labels, pointed vertex and root."""

    def decorate(d: int) -> Hashable:
        v = m.origin(d)
        return (
            labels[v] if labels is not None else None,
            v == pointed if pointed is not None else None,
        )

    if not m.n_darts:
        return (("vertex", labels[0] if labels is not None else None),)
    if root is not None:
        return rooted_code(m, root, decorate)
    return canonical_code(m, decorate)


def insert_edge(m: DartMap, before_a: int, before_b: int) -> tuple[DartMap, int, int]:
    """
    Add an edge whose darts sit just counterclockwise before ``before_a`` and ``before_b``.

    Returns:
        tuple[DartMap, int, int]: The new map and the two new darts (at the origins of
        ``before_a`` and ``before_b`` respectively).
    """
    n = m.n_darts
    x, y = n, n + 1
    sigma = list(m.sigma) + [before_a, before_b]
    alpha = list(m.alpha) + [y, x]
    pa, pb = m.sigma_inv[before_a], m.sigma_inv[before_b]
    sigma[pa] = x
    if pb == pa:
        sigma[x] = y
        sigma[y] = before_a
    else:
        sigma[pb] = y
    return DartMap(tuple(sigma), tuple(alpha)), x, y


def delete_edges(m: DartMap, darts: Iterable[int]) -> tuple[DartMap, dict[int, int]]:
    """
    Remove the edges of the given darts and renumber the remaining darts.

    Returns:
        tuple[DartMap, dict[int, int]]: The smaller map and the old-to-new dart numbering.
    """
    gone = set()
    for d in darts:
        gone.update((d, m.alpha[d]))
    kept = [d for d in range(m.n_darts) if d not in gone]
    pos = {d: k for k, d in enumerate(kept)}
    sigma = []
    for d in kept:
        nxt = m.sigma[d]
        while nxt in gone:
            nxt = m.sigma[nxt]
        sigma.append(pos[nxt])
    alpha = [pos[m.alpha[d]] for d in kept]
    return build_map(sigma, alpha), pos
