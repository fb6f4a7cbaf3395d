"""
Bijections Module
This module provides the opening and closing bijections between suitably labelled
maps and well-labelled hypermaps, their mirror forms, the pointed compositions with
mobiles and the specializations to constellations.

Opening a labelled map places a black vertex in each of its faces and joins it to the
corner before every falling dart met clockwise around the face; the local minima and
the old edges are then erased. The mirror opening grows spokes towards the rising darts
instead and deletes the old edges afterwards. Closing a well-labelled hypermap adds an
apex in every light face and sends a leg from each light corner to the next corner one
label lower, counterclockwise around the face.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from src.services.errors import BijectionError, LabelError, MobileError, VerificationError
from src.services.labels import (
    CyclicSequence,
    face_type,
    local_extrema,
    miermont_labelling,
    opp,
    rises_then_descents,
    validate_mirror,
    validate_suitable,
    validate_well_labelled,
)
from src.services.maps import (
    DartMap,
    Hypermap,
    RootedPointedMap,
    StarMap,
    build_map,
    collapse_stars,
    constellation_check,
    delete_edges,
    directed_distances,
    graph_distances,
    hypermap_from_hyperdarts,
    insert_edge,
    map_to_hypermap,
    perm_from_cycles,
    star_representation,
)
from src.services.mobiles import Flavor, Mobile, from_tree_map, to_tree_map, validate


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabelledMap:
    map: DartMap
    labels: tuple[int, ...]


@dataclass(frozen=True)
class LabelledHypermap:
    hypermap: Hypermap
    labels: tuple[int, ...]


@dataclass(frozen=True)
class PointedMap:
    """
    A map with a pointed vertex and its geodesic labelling.

    Attributes:
        map (DartMap): The map.
        labels (tuple[int, ...]): Graph distance of every vertex from ``pointed``.
        pointed (int): The pointed vertex.
    """

    map: DartMap
    labels: tuple[int, ...]
    pointed: int


@dataclass(frozen=True)
class PointedHypermap:
    """
    A hypermap with a pointed vertex, its labelling and an optional root.

    Attributes:
        hypermap (Hypermap): The hypermap.
        labels (tuple[int, ...]): One label per vertex.
        pointed (int): The pointed vertex.
        root (int | None): A canonical root dart when the object is rooted.
    """

    hypermap: Hypermap
    labels: tuple[int, ...]
    pointed: int
    root: int | None = None

    def rooted(self) -> RootedPointedMap:
        if self.root is None:
            raise BijectionError("this hypermap carries no root")
        return RootedPointedMap(self.hypermap, self.root, self.pointed)


@dataclass(frozen=True)
class FaceMatch:
    """
    A dark face paired with the face it comes from.

    Attributes:
        face (int): The face on the other side.
        dark_type (CyclicSequence): Type of the dark face.
        face_type (CyclicSequence): Type of the matched face, read in the same direction.
    """

    face: int
    dark_type: CyclicSequence
    face_type: CyclicSequence


@dataclass(frozen=True)
class Correspondence:
    """
    Parameter correspondence reported by a bijection.

    Attributes:
        vertices (dict[int, int]): Hypermap vertex to vertex on the other side.
        light_faces (dict[int, int]): Light face to the extremal vertex it encloses.
        dark_faces (dict[int, FaceMatch]): Dark face to its matched face with both types.
        darts (dict[int, int]): Canonical hypermap dart to the dart it is transported to.
    """

    vertices: dict[int, int]
    light_faces: dict[int, int]
    dark_faces: dict[int, FaceMatch]
    darts: dict[int, int]


def _face_matches(
    h: Hypermap,
    h_labels: Sequence[int],
    b: DartMap,
    b_labels: Sequence[int],
    pairs: dict[int, int],
    direction: str,
) -> dict[int, FaceMatch]:
    return {
        f: FaceMatch(g, face_type(h, f, h_labels, direction), face_type(b, g, b_labels, direction))
        for f, g in pairs.items()
    }


def phi(b: DartMap, labels: Sequence[int]) -> tuple[LabelledHypermap, Correspondence]:
    """
    Open a suitably labelled map into a well-labelled hypermap.

    Args:
        b (DartMap): The map, with at least one edge.
        labels (Sequence[int]): A suitable labelling.

    Returns:
        tuple[LabelledHypermap, Correspondence]: The hypermap with the inherited labels.
        Local minima of ``b`` become light faces and each face of ``b`` a dark face whose
        clockwise type has the face type as lower completion.
    """
    if not b.n_darts:
        raise BijectionError("the vertex map has no face to open")
    if not validate_suitable(b, labels):
        raise LabelError("labelling is not suitable")
    chosen = [d for d in range(b.n_darts) if labels[b.target(d)] == labels[b.origin(d)] - 1]
    index = {d: k for k, d in enumerate(chosen)}
    n = 2 * len(chosen)
    sigma = [0] * n
    alpha = [0] * n
    for k, d in enumerate(chosen):
        alpha[2 * k], alpha[2 * k + 1] = 2 * k + 1, 2 * k
        nxt = b.sigma[d]
        while nxt not in index:
            nxt = b.sigma[nxt]
        sigma[2 * k] = 2 * index[nxt]
        # counterclockwise around the face centre is phi backwards
        prv = b.phi_inv[d]
        while prv not in index:
            prv = b.phi_inv[prv]
        sigma[2 * k + 1] = 2 * index[prv] + 1
    star = build_map(sigma, alpha)
    black = frozenset(star.vertex_of[2 * k + 1] for k in range(len(chosen)))
    h = collapse_stars(StarMap(star, black)).hypermap
    m = h.map

    h_labels = [0] * m.n_vertices
    vertices = {}
    for k, d in enumerate(chosen):
        v = m.origin(2 * k)
        h_labels[v] = labels[b.origin(d)]
        vertices[v] = b.origin(d)

    mins, _ = local_extrema(b, labels)
    light_faces = {}
    for u in mins:
        k = index[b.alpha[b.vertices[u][0]]]
        light_faces[m.face_of[m.sigma[2 * k]]] = u

    pairs = {}
    for k, d in enumerate(chosen):
        pairs.setdefault(m.face_of[2 * k], b.face_of[d])
    dark_faces = _face_matches(h, h_labels, b, labels, pairs, "cw")
    darts = {2 * k: d for k, d in enumerate(chosen)}
    logger.debug("opened a map with %d edges into %d dark faces", b.n_edges, len(dark_faces))
    return LabelledHypermap(h, tuple(h_labels)), Correspondence(vertices, light_faces, dark_faces, darts)


def phi_minus(b: DartMap, labels: Sequence[int]) -> tuple[LabelledHypermap, Correspondence]:
    """
    Open a suitably labelled map along its rising darts into a mirror-well-labelled hypermap.

    A spoke is inserted in every face, from its centre to the corner before each rising
    dart met clockwise; the edges of ``b`` are then deleted, which also drops its local
    maxima, and the remaining star map is collapsed.

    Args:
        b (DartMap): The map, with at least one edge.
        labels (Sequence[int]): A suitable labelling.

    Returns:
        tuple[LabelledHypermap, Correspondence]: Local maxima become light faces; dark faces
        are matched through counterclockwise types and upper completion.
    """
    if not b.n_darts:
        raise BijectionError("the vertex map has no face to open")
    if not validate_suitable(b, labels):
        raise LabelError("labelling is not suitable")
    n = b.n_darts
    rising = [d for d in range(n) if labels[b.target(d)] == labels[b.origin(d)] + 1]
    spoke = {d: n + 2 * j for j, d in enumerate(rising)}

    cycles = []
    for orbit in b.vertices:
        ring = []
        for d in orbit:
            if d in spoke:
                ring.append(spoke[d])
            ring.append(d)
        cycles.append(ring)
    for face in b.faces:
        centre = [spoke[d] + 1 for d in reversed(face) if d in spoke]
        if centre:
            cycles.append(centre)
    total = n + 2 * len(rising)
    alpha = list(b.alpha) + [n + (j ^ 1) for j in range(2 * len(rising))]
    grown = build_map(perm_from_cycles(total, cycles), alpha)
    star, pos = delete_edges(grown, range(n))
    black = frozenset(star.vertex_of[2 * j + 1] for j in range(len(rising)))
    collapsed = collapse_stars(StarMap(star, black))
    h = collapsed.hypermap
    m = h.map

    h_labels = [0] * m.n_vertices
    vertices = {}
    darts = {}
    pairs = {}
    for j, d in enumerate(rising):
        c = collapsed.canonical_of[2 * j]
        v = m.origin(c)
        h_labels[v] = labels[b.origin(d)]
        vertices[v] = b.origin(d)
        darts[c] = d
        pairs.setdefault(collapsed.dark_face_of[star.vertex_of[2 * j + 1]], b.face_of[d])

    _, maxs = local_extrema(b, labels)
    light_faces = {}
    for u in maxs:
        w = pos[spoke[b.alpha[b.vertices[u][0]]]]
        light_faces[collapsed.light_face_of[star.face_of[star.sigma[w]]]] = u

    dark_faces = _face_matches(h, h_labels, b, labels, pairs, "ccw")
    logger.debug("opened a map with %d edges along %d rising darts", b.n_edges, len(rising))
    return LabelledHypermap(h, tuple(h_labels)), Correspondence(vertices, light_faces, dark_faces, darts)


def psi(h: Hypermap, labels: Sequence[int]) -> tuple[LabelledMap, Correspondence]:
    """
    Close a well-labelled hypermap into a suitably labelled map.

    Args:
        h (Hypermap): The hypermap, with at least one edge.
        labels (Sequence[int]): A well labelling.

    Returns:
        tuple[LabelledMap, Correspondence]: The map. Light face ``f`` gains a vertex labelled
        ``min(f) - 1``; map edge ``k`` starts with dart ``2k`` at the corner of the ``k``-th
        light dart and ends with dart ``2k + 1``.
    """
    m = h.map
    if not m.n_darts:
        raise BijectionError("the vertex hypermap has no light face to close")
    if not validate_well_labelled(h, labels):
        raise LabelError("labelling is not well-labelled")
    light = [d for d in range(m.n_darts) if not h.is_canonical(d)]
    index = {d: k for k, d in enumerate(light)}
    arrivals: dict[int, list[tuple[int, int]]] = {d: [] for d in light}
    apexes: dict[int, list[int]] = {}
    apex_label: dict[int, int] = {}
    for f in h.light_faces:
        corners = m.faces[f]
        size = len(corners)
        ranks = [labels[m.origin(d)] for d in corners]
        low = min(ranks)
        ring = []
        for j, d in enumerate(corners):
            far = 2 * index[d] + 1
            if ranks[j] == low:
                ring.append(far)
                continue
            for back in range(1, size):
                if ranks[(j - back) % size] == ranks[j] - 1:
                    break
            else:
                raise BijectionError(f"no lower corner found in light face {f + 1}")
            arrivals[corners[(j - back) % size]].append((back, far))
        apexes[f] = ring
        apex_label[f] = low - 1

    cycles = []
    for orbit in m.vertices:
        ring = []
        for d in orbit:
            if d in index:
                # own leg first, then arrivals from the farthest corner to the nearest
                ring.append(2 * index[d])
                ring.extend(far for _, far in sorted(arrivals[d], reverse=True))
        cycles.append(ring)
    for f in h.light_faces:
        cycles.append(list(reversed(apexes[f])))
    n = 2 * len(light)
    b = build_map(perm_from_cycles(n, cycles), [d ^ 1 for d in range(n)])

    b_labels = [0] * b.n_vertices
    vertices = {}
    for v, orbit in enumerate(m.vertices):
        d = next(d for d in orbit if d in index)
        u = b.origin(2 * index[d])
        vertices[v] = u
        b_labels[u] = labels[v]
    light_faces = {}
    for f in h.light_faces:
        u = b.origin(apexes[f][0])
        light_faces[f] = u
        b_labels[u] = apex_label[f]

    darts = {c: 2 * index[m.sigma[c]] for c in h.canonical_darts}
    pairs = {}
    for c, own in darts.items():
        pairs.setdefault(m.face_of[c], b.face_of[own])
    dark_faces = _face_matches(h, labels, b, b_labels, pairs, "cw")
    logger.debug("closed a hypermap with %d light faces", len(light_faces))
    return LabelledMap(b, tuple(b_labels)), Correspondence(vertices, light_faces, dark_faces, darts)


def psi_minus(h: Hypermap, labels: Sequence[int]) -> tuple[LabelledMap, Correspondence]:
    """Close a mirror-well-labelled hypermap; the inverse of ``phi_minus``."""
    if not validate_mirror(h, labels):
        raise LabelError("labelling is not mirror-well-labelled")
    closed, corr = psi(h, opp(labels))
    b_labels = opp(closed.labels)
    pairs = {f: match.face for f, match in corr.dark_faces.items()}
    dark_faces = _face_matches(h, labels, closed.map, b_labels, pairs, "ccw")
    return LabelledMap(closed.map, b_labels), Correspondence(
        corr.vertices, corr.light_faces, dark_faces, corr.darts
    )


@dataclass(frozen=True)
class MobileEncoding:
    """
    A pointed hypermap encoded as a mobile, with the correspondence spelled out.

    Attributes:
        mobile (Mobile): The planted mobile.
        star (StarMap): The mobile drawn as a plane tree.
        labels (tuple[int | None, ...]): Label of every tree vertex, ``None`` on black ones.
        root_dart (int): White tree dart opening the root corner.
        vertices (dict[int, int]): Unpointed hypermap vertex to white tree vertex.
        dark_faces (dict[int, int]): Dark face to black tree vertex.
        light_faces (dict[int, int]): Light face to the white tree vertex labelled ``max(f) + 1``.
        darts (dict[int, int]): Canonical dart to the white tree dart of the corner it is
            transported to; ``root_dart`` is the image of the root.
    """

    mobile: Mobile
    star: StarMap
    labels: tuple[int | None, ...]
    root_dart: int
    vertices: dict[int, int]
    dark_faces: dict[int, int]
    light_faces: dict[int, int]
    darts: dict[int, int]


def encode_pointed(h: Hypermap, pointed: int, root: int | None = None) -> MobileEncoding:
    """
    Encode a pointed hypermap as a mobile.

    The geodesic labelling from ``pointed`` is closed with the mirror rules and the
    resulting map, whose only local minimum is ``pointed``, is opened again.

    Args:
        h (Hypermap): The hypermap, with at least one edge.
        pointed (int): The pointed vertex.
        root (int | None): A canonical root dart; without it the mobile is planted at the
            corner giving the smallest encoding.

    Returns:
        MobileEncoding: The mobile and its correspondence with ``h``.
    """
    if not h.map.n_darts:
        raise BijectionError("hypermaps of size zero have no mobile")
    if root is not None and not h.is_canonical(root):
        raise BijectionError("the root must have its dark face on the right")
    labels = directed_distances(h, pointed)
    closed, back = psi_minus(h, labels)
    opened, fwd = phi(closed.map, closed.labels)
    mh = opened.hypermap
    star, canonical = star_representation(mh)
    s = star.map
    if s.n_vertices != s.n_edges + 1:
        raise VerificationError("mobile-is-tree", h.to_json(pointed_vertex=pointed + 1))

    position = {c: k for k, c in enumerate(canonical)}
    tree_vertex = {mh.map.origin(c): s.origin(2 * k) for k, c in enumerate(canonical)}
    black_of = {mh.map.face_of[c]: s.origin(2 * k + 1) for k, c in enumerate(canonical)}
    tree_labels: list[int | None] = [None] * s.n_vertices
    for v, w in tree_vertex.items():
        tree_labels[w] = opened.labels[v]

    opened_dart = {d: c for c, d in fwd.darts.items()}
    darts = {c: 2 * position[opened_dart[closed.map.alpha[own]]] for c, own in back.darts.items()}
    if root is None:
        root_dart = min(
            (2 * k for k in range(len(canonical))),
            key=lambda w: from_tree_map(s, tree_labels, star.black, w).encode(),
        )
    else:
        root_dart = darts[root]
    mobile = from_tree_map(s, tree_labels, star.black, root_dart)

    from_b = {u: v for v, u in fwd.vertices.items()}
    from_b_face = {match.face: f for f, match in fwd.dark_faces.items()}
    return MobileEncoding(
        mobile=mobile,
        star=star,
        labels=tuple(tree_labels),
        root_dart=root_dart,
        vertices={v: tree_vertex[from_b[u]] for v, u in back.vertices.items() if v != pointed},
        dark_faces={f: black_of[from_b_face[match.face]] for f, match in back.dark_faces.items()},
        light_faces={f: tree_vertex[from_b[u]] for f, u in back.light_faces.items()},
        darts=darts,
    )


def hypermap_to_mobile(h: Hypermap, pointed: int, root: int | None = None) -> Mobile:
    """
    The mobile of a pointed hypermap.

    Args:
        h (Hypermap): The hypermap.
        pointed (int): The pointed vertex.
        root (int | None): A canonical root dart transported to the mobile's root corner.

    Returns:
        Mobile: A mobile whose black vertices match the dark faces of ``h``.
    """
    return encode_pointed(h, pointed, root).mobile


def mobile_to_hypermap(mobile: Mobile) -> PointedHypermap:
    """
    Decode a planted mobile into a rooted pointed hypermap with its geodesic labelling.

    Args:
        mobile (Mobile): A mobile with minimal label 1 and at least one black vertex.

    Returns:
        PointedHypermap: The hypermap, rooted at the dart transported from the root corner.
    """
    if not mobile.n_black:
        raise BijectionError("the bare mobile encodes no hypermap")
    if not validate(mobile, Flavor(p=None)):
        raise MobileError(f"{mobile.encode()} is not a mobile with minimal label 1")
    embedded = to_tree_map(mobile)
    collapsed = collapse_stars(embedded.star)
    mh = collapsed.hypermap
    mh_labels = [0] * mh.map.n_vertices
    for w, v in collapsed.vertex_of.items():
        mh_labels[v] = int(embedded.labels[w])
    closed, corr = psi(mh, mh_labels)
    (light,) = mh.light_faces
    apex = corr.light_faces[light]
    own = corr.darts[collapsed.canonical_of[embedded.root_dart]]
    opened, mirror = phi_minus(closed.map, closed.labels)
    pointed = next(v for v, u in mirror.vertices.items() if u == apex)
    root = next(c for c, d in mirror.darts.items() if d == closed.map.alpha[own])
    return PointedHypermap(opened.hypermap, opened.labels, pointed, root)


def hypermap_to_bipartite(h: Hypermap, pointed: int) -> tuple[PointedMap, Correspondence]:
    """
    Pointed hypermap to pointed bipartite map, preserving distances from the pointed vertex.

    Args:
        h (Hypermap): The hypermap.
        pointed (int): The pointed vertex.

    Returns:
        tuple[PointedMap, Correspondence]: The bipartite map with its geodesic labelling.
    """
    labels = directed_distances(h, pointed)
    closed, corr = psi_minus(h, labels)
    return PointedMap(closed.map, closed.labels, corr.vertices[pointed]), corr


def bipartite_to_hypermap(b: DartMap, pointed: int) -> tuple[PointedHypermap, Correspondence]:
    """Inverse of ``hypermap_to_bipartite``."""
    labels = graph_distances(b, pointed)
    opened, corr = phi_minus(b, labels)
    image = next(v for v, u in corr.vertices.items() if u == pointed)
    return PointedHypermap(opened.hypermap, opened.labels, image), corr


def _constellation_degree(c: Hypermap) -> int:
    degrees = {c.map.face_degree(f) for f in c.dark_faces}
    if len(degrees) != 1:
        raise BijectionError("dark faces of a constellation share one degree")
    (p,) = degrees
    if p < 2:
        raise BijectionError(f"constellations need dark faces of degree at least 2, got {p}")
    coloring = constellation_check(c, p)
    if not coloring.ok:
        raise BijectionError(f"not a {p}-constellation: dark face {coloring.witness_face + 1} breaks the colouring")
    return p


def constellation_to_descending_mobile(c: Hypermap, pointed: int, root: int | None = None) -> Mobile:
    """
    The mobile of a pointed p-constellation, which is p-descending.

    Args:
        c (Hypermap): A p-constellation.
        pointed (int): The pointed vertex.
        root (int | None): Optional canonical root dart.

    Returns:
        Mobile: A mobile whose black vertices all have degree p and a descending type.
    """
    p = _constellation_degree(c)
    mobile = hypermap_to_mobile(c, pointed, root)
    if not validate(mobile, Flavor(p=p, descending=True)):
        raise VerificationError(
            "descending-mobile", {"mobile": mobile.encode(), **c.to_json(pointed_vertex=pointed + 1)}
        )
    return mobile


def descending_mobile_to_constellation(mobile: Mobile) -> PointedHypermap:
    degrees = {len(ring) for ring in mobile.stars}
    if len(degrees) != 1:
        raise MobileError("black vertices of a descending mobile share one degree")
    (p,) = degrees
    if not validate(mobile, Flavor(p=p, descending=True)):
        raise MobileError(f"{mobile.encode()} is not {p}-descending")
    return mobile_to_hypermap(mobile)


def constellation_to_regular(c: Hypermap, pointed: int) -> tuple[PointedHypermap, Correspondence]:
    """
    Pointed p-constellation to pointed (p+1)-regular constellation, preserving distances.

    The stretched 2p-angulation obtained by closing ``c`` gets, in every face, a diagonal
    from its largest to its smallest vertex; the side on the right of the diagonal is dark.

    Args:
        c (Hypermap): A p-constellation.
        pointed (int): The pointed vertex.

    Returns:
        tuple[PointedHypermap, Correspondence]: The regular constellation with its geodesic
        labelling; light faces of ``c`` map to its right local maxima of label ``max(f) + 1``.
    """
    p = _constellation_degree(c)
    labels = directed_distances(c, pointed)
    closed, back = psi_minus(c, labels)
    b = closed.map
    grown = b
    diagonals = {}
    for f in range(b.n_faces):
        if not rises_then_descents(face_type(b, f, closed.labels), p):
            raise VerificationError("stretched-face", {"face": f + 1, **b.to_json()})
        darts = b.faces[f]
        top = max(darts, key=lambda d: closed.labels[b.origin(d)])
        bottom = min(darts, key=lambda d: closed.labels[b.origin(d)])
        grown, x, _ = insert_edge(grown, top, bottom)
        diagonals[f] = x
    dark = [False] * grown.n_faces
    for x in diagonals.values():
        dark[grown.face_of[x]] = True
    e = Hypermap(grown, tuple(dark))

    def image(u: int) -> int:
        return grown.vertex_of[b.vertices[u][0]]

    e_labels = [0] * grown.n_vertices
    for u in range(b.n_vertices):
        e_labels[image(u)] = closed.labels[u]
    result = PointedHypermap(e, tuple(e_labels), image(back.vertices[pointed]))
    if result.labels != directed_distances(e, result.pointed):
        raise VerificationError("regular-geodesic", e.to_json(pointed_vertex=result.pointed + 1))

    dark_faces = {
        f: FaceMatch(grown.face_of[diagonals[match.face]], match.dark_type, match.face_type)
        for f, match in back.dark_faces.items()
    }
    corr = Correspondence(
        vertices={v: image(u) for v, u in back.vertices.items()},
        light_faces={f: image(u) for f, u in back.light_faces.items()},
        dark_faces=dark_faces,
        darts=dict(back.darts),
    )
    return result, corr


def regular_to_constellation(e: Hypermap, pointed: int) -> PointedHypermap:
    """
    Inverse of ``constellation_to_regular``: drop the edges whose labels differ by p and reopen.

    Args:
        e (Hypermap): A (p+1)-regular constellation.
        pointed (int): The pointed vertex.

    Returns:
        PointedHypermap: The pointed p-constellation with its geodesic labelling.
    """
    q = _constellation_degree(e)
    if any(e.map.face_degree(f) != q for f in e.light_faces):
        raise BijectionError(f"light faces of a regular constellation have degree {q}")
    p = q - 1
    if p < 2:
        raise BijectionError("regular constellations come from p-constellations with p >= 2")
    labels = directed_distances(e, pointed)
    m = e.map
    long = [
        d for d in range(m.n_darts)
        if d < m.alpha[d] and abs(labels[m.target(d)] - labels[m.origin(d)]) == p
    ]
    b, pos = delete_edges(m, long)
    b_labels = [0] * b.n_vertices
    for d, k in pos.items():
        b_labels[b.origin(k)] = labels[m.origin(d)]
    kept = next(d for d in m.vertices[pointed] if d in pos)
    apex = b.origin(pos[kept])
    opened, corr = phi_minus(b, b_labels)
    image = next(v for v, u in corr.vertices.items() if u == apex)
    return PointedHypermap(opened.hypermap, opened.labels, image)


def classical_bipartite_to_hypermap(b: DartMap, pointed: int) -> PointedHypermap:
    """
    The parity bijection: a dark face joins the even corners of every face.

    This is the opening with label 1 at even distance and 0 at odd distance, so it keeps
    face degrees halved but not distances.
    """
    parity = tuple(1 - d % 2 for d in graph_distances(b, pointed))
    opened, corr = phi(b, parity)
    image = next(v for v, u in corr.vertices.items() if u == pointed)
    h = opened.hypermap
    return PointedHypermap(h, directed_distances(h, image), image)


def classical_hypermap_to_bipartite(h: Hypermap, pointed: int) -> PointedMap:
    """Join a new vertex in every light face to all its corners and erase the hypermap edges."""
    closed, corr = psi(h, (1,) * h.map.n_vertices)
    b = closed.map
    image = corr.vertices[pointed]
    return PointedMap(b, graph_distances(b, image), image)


def classical_constellation_to_regular(c: Hypermap, pointed: int) -> PointedHypermap:
    """
    The colouring bijection: a vertex of colour p in every light face, through which every
    edge from colour p-1 to colour 0 is rerouted.

    Args:
        c (Hypermap): A p-constellation, coloured by distance from ``pointed`` modulo p.
        pointed (int): The pointed vertex.

    Returns:
        PointedHypermap: The (p+1)-regular constellation with its geodesic labelling.
    """
    p = _constellation_degree(c)
    colors = [x % p for x in directed_distances(c, pointed)]
    m = c.map
    canonical = c.canonical_darts
    index = {e: k for k, e in enumerate(canonical)}
    sigma: list[int] = [index[m.sigma[m.sigma[e]]] for e in canonical]
    alpha: list[int] = [index[m.phi_inv[e]] for e in canonical]
    rerouted = {}
    for f in c.dark_faces:
        first = next(e for e in m.faces[f] if colors[m.origin(e)] == 0)
        last = m.phi_inv[first]
        new = len(sigma)
        sigma.append(new)
        alpha.append(index[last])
        alpha[index[first]] = new
        rerouted[m.alpha[last]] = new
    for g in c.light_faces:
        ring = [rerouted[d] for d in reversed(m.faces[g]) if d in rerouted]
        for k, x in enumerate(ring):
            sigma[x] = ring[(k + 1) % len(ring)]
    e = hypermap_from_hyperdarts(sigma, alpha).hypermap
    image = e.map.origin(2 * index[next(d for d in m.vertices[pointed] if c.is_canonical(d))])
    return PointedHypermap(e, directed_distances(e, image), image)


def classical_regular_to_constellation(e: Hypermap, pointed: int) -> PointedHypermap:
    """Draw the diagonal from colour p-1 to colour 0 in every dark face and erase colour p."""
    q = _constellation_degree(e)
    p = q - 1
    colors = [x % q for x in directed_distances(e, pointed)]
    m = e.map
    keep = [x for x in e.canonical_darts if colors[m.origin(x)] != p]
    index = {x: k for k, x in enumerate(keep)}
    sigma = [index[m.sigma[m.sigma[x]]] for x in keep]
    alpha = []
    for x in keep:
        y = m.phi_inv[x]
        while y not in index:
            y = m.phi_inv[y]
        alpha.append(index[y])
    c = hypermap_from_hyperdarts(sigma, alpha).hypermap
    image = c.map.origin(2 * index[next(d for d in m.vertices[pointed] if e.is_canonical(d))])
    return PointedHypermap(c, directed_distances(c, image), image)


def classical_bijections(obj: DartMap | Hypermap, pointed: int) -> PointedHypermap:
    """
    The distance-forgetting bijections, used as structural cross-checks.

    Args:
        obj (DartMap | Hypermap): A bipartite map, or a p-constellation.
        pointed (int): The pointed vertex.

    Returns:
        PointedHypermap: The hypermap, or the (p+1)-regular constellation.
    """
    if isinstance(obj, DartMap):
        return classical_bipartite_to_hypermap(obj, pointed)
    return classical_constellation_to_regular(obj, pointed)


def quadrangulation_check(q: DartMap, labels: Sequence[int]) -> bool:
    """
    On a suitably labelled quadrangulation the opening yields dark faces of degree 2 and
    the labels follow the delayed distance prescription from the local minima.
    """
    if any(q.face_degree(f) != 4 for f in range(q.n_faces)):
        raise BijectionError("not a quadrangulation")
    opened, _ = phi(q, labels)
    return opened.hypermap.is_p_hypermap(2) and miermont_labelling(q, labels)


@dataclass(frozen=True)
class EdgeTriple:
    """
    A rising hypermap edge matched with three consecutive white corners of its mobile.

    Attributes:
        dart (int): The canonical dart, from label ``i - 1`` to label ``i``.
        position (int): Index of the first corner in the counterclockwise white contour.
        whites (tuple[int, int, int]): The three white tree vertices.
        labels (tuple[int, int, int]): Their labels ``i, i + 1, i + 2``.
    """

    dart: int
    position: int
    whites: tuple[int, int, int]
    labels: tuple[int, int, int]


def hypermap_edge_to_mobile_triple(h: Hypermap, pointed: int) -> list[EdgeTriple]:
    """
    Match rising edges of a pointed hypermap with rising white triples of its 2-descending mobile.

    The mobile is the one of the pointed bipartite map of ``h`` viewed as a 2-constellation.
    Each edge is followed through the bipartite map to a corner of the mobile at its
    vertex of label ``i``; its triple opens at the next corner counterclockwise around
    that vertex.

    Args:
        h (Hypermap): The hypermap.
        pointed (int): The pointed vertex.

    Returns:
        list[EdgeTriple]: One entry per canonical dart from label ``i - 1`` to label ``i``.

    Raises:
        VerificationError: If an edge lands outside a rising triple at its own vertex, or
            the matching is not one-to-one.
    """
    labels = directed_distances(h, pointed)
    bip, back = hypermap_to_bipartite(h, pointed)
    b = bip.map
    c2 = map_to_hypermap(b)
    to_c2 = {u: c2.map.origin(2 * b.vertices[u][0]) for u in range(b.n_vertices)}
    encoding = encode_pointed(c2, to_c2[bip.pointed])
    s = encoding.star.map
    contour = [d for d in s.faces[0] if encoding.star.is_white_dart(d)]
    at = {d: k for k, d in enumerate(contour)}
    size = len(contour)

    triples = {}
    for k in range(size):
        trio = tuple(s.origin(contour[(k + j) % size]) for j in range(3))
        labs = tuple(int(encoding.labels[w]) for w in trio)
        if labs[1] == labs[0] + 1 and labs[2] == labs[0] + 2:
            triples[k] = (trio, labs)

    witness = {"mobile": encoding.mobile.encode(), **h.to_json(pointed_vertex=pointed + 1)}
    m = h.map
    out = []
    for e in h.canonical_darts:
        if labels[m.target(e)] != labels[m.origin(e)] + 1:
            continue
        # the bipartite dart of e runs from label i - 1 to the image of its target
        a = back.darts[e]
        corner = s.sigma[encoding.darts[2 * a]]
        k = at[corner]
        home = encoding.vertices[to_c2[back.vertices[m.target(e)]]]
        if k not in triples or triples[k][0][0] != home:
            raise VerificationError("edge-triple", {**witness, "dart": e + 1})
        out.append(EdgeTriple(e, k, *triples[k]))

    if sorted(t.position for t in out) != sorted(triples):
        raise VerificationError("edge-triple", witness)
    return out
