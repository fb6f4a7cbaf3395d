"""
Oracle Module
This module provides brute-force enumeration of small rooted maps and hypermaps,
distance profiles of their pointed versions, exhaustive labelled instances and
a goodness-of-fit check of the mobile sampler.

Rooted objects are generated directly in canonical form: darts are numbered in the
breadth-first order opened by the root, ``alpha`` before ``sigma``, so every rooted
class is produced exactly once.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from scipy.stats import chisquare

from src.conf.config import settings
from src.services.bijections import LabelledHypermap, LabelledMap, mobile_to_hypermap
from src.services.errors import BijectionError, CapacityError, MapError, VerificationError
from src.services.labels import face_type, validate_suitable, validate_well_labelled
from src.services.maps import (
    DartMap,
    Hypermap,
    bfs_order,
    constellation_check,
    directed_distances,
    graph_distances,
    hypermap_from_hyperdarts,
    hypermap_to_map,
    map_code,
)
from src.services.mobiles import Flavor, Mobile, MobileCounts, counting_table, sample_pointed_rooted


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constraints:
    """
    Filters applied to generated rooted objects.

    Attributes:
        bipartite (bool): Keep maps whose vertices are properly 2-colourable.
        eulerian (bool): Keep maps whose vertex degrees are all even.
        p_hypermap (int | None): Generate hypermaps whose dark faces all have degree p.
        p_constellation (int | None): Generate p-constellations.
    """

    bipartite: bool = False
    eulerian: bool = False
    p_hypermap: int | None = None
    p_constellation: int | None = None

    @property
    def degree(self) -> int | None:
        return self.p_constellation or self.p_hypermap


@dataclass(frozen=True)
class OracleFamily:
    """
    How a family is generated and sized.

    Attributes:
        name (str): Family tag.
        hyper (bool): Whether objects are hypermaps generated on hyperdarts.
        cycle (int | None): Required length of every ``alpha`` cycle.
        unit (int): Generated darts (maps) or hyperdarts per unit of size.
        bipartite (bool): Whether maps must be bipartite.
        constellation (bool): Whether hypermaps must be constellations.
    """

    name: str
    hyper: bool
    cycle: int | None
    unit: int
    bipartite: bool = False
    constellation: bool = False


FAMILIES = {
    "GeneralMap": OracleFamily("GeneralMap", False, 2, 2),
    "BipartiteMap": OracleFamily("BipartiteMap", False, 2, 2, bipartite=True),
    "GeneralHypermap": OracleFamily("GeneralHypermap", True, None, 1),
    "ThreeHypermap": OracleFamily("ThreeHypermap", True, 3, 3),
    "ThreeConstellation": OracleFamily("ThreeConstellation", True, 3, 3, constellation=True),
}
ALIASES = {
    "GeneralMap2Par": "GeneralMap",
    "BipartiteMap2Par": "BipartiteMap",
    "GeneralHypermap2Par": "GeneralHypermap",
}


def oracle_family(name: str) -> OracleFamily:
    family = FAMILIES.get(ALIASES.get(name, name))
    if family is None:
        raise MapError(f"unknown family {name!r}")
    return family


@dataclass(frozen=True)
class RootedClass:
    """
    One rooted isomorphism class in canonical numbering.

    Attributes:
        encoding (str): One-based ``sigma/alpha`` in canonical numbering.
        sigma (tuple[int, ...]): Vertex rotation (white rotation for hypermaps).
        alpha (tuple[int, ...]): Edge involution (black rotation for hypermaps).
        hyper (bool): Whether the pair describes a hypermap on hyperdarts.
        faces (int): Faces of a map, dark faces of a hypermap.
        count_by_type (dict[tuple[int, ...], int]): Pointed versions per root type.
    """

    encoding: str
    sigma: tuple[int, ...]
    alpha: tuple[int, ...]
    hyper: bool
    faces: int
    count_by_type: dict[tuple[int, ...], int] = field(default_factory=dict)

    def structure(self) -> DartMap | Hypermap:
        if self.hyper:
            return hypermap_from_hyperdarts(self.sigma, self.alpha).hypermap
        return DartMap(self.sigma, self.alpha)


@dataclass
class EnumerationReport:
    """
    Rooted classes of a family at one size, optionally profiled over pointed vertices.

    Attributes:
        family (str): Family tag.
        n (int): Size: edges, or dark faces for the 3-families.
        classes (list[RootedClass]): One entry per rooted class, sorted by encoding.
        kind (str | None): ``root`` or ``face`` when profiled.
    """

    family: str
    n: int
    classes: list[RootedClass]
    kind: str | None = None

    @property
    def total(self) -> int:
        return len(self.classes)

    @property
    def pointed_total(self) -> int:
        return sum(sum(c.count_by_type.values()) for c in self.classes)

    def by_type(self, faces: int | None = None) -> Counter:
        out = Counter()
        for c in self.classes:
            if faces is None or c.faces == faces:
                out.update(c.count_by_type)
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "family": self.family,
            "kind": self.kind,
            "total": self.total,
            "pointed_total": self.pointed_total,
            "classes": [
                {
                    "encoding": c.encoding,
                    "faces": c.faces,
                    "count_by_type": {
                        ",".join(map(str, key)): value for key, value in sorted(c.count_by_type.items())
                    },
                }
                for c in self.classes
            ],
        }


def tutte_count(n: int) -> int:
    """Rooted planar maps with ``n`` edges: ``2 * 3^n (2n)! / (n! (n+2)!)``."""
    return 2 * 3**n * math.factorial(2 * n) // (math.factorial(n) * math.factorial(n + 2))


_State = tuple[list, list, list, list, int, int]


def _chain_ok(alpha: list, alpha_inv: list, k: int, cycle: int) -> bool:
    nodes, x = 1, alpha[k]
    while x is not None and x != k:
        nodes += 1
        x = alpha[x]
    if x == k:
        return nodes == cycle
    y = alpha_inv[k]
    while y is not None:
        nodes += 1
        y = alpha_inv[y]
    return nodes <= cycle


def _step(state: _State, size: int, cycle: int | None) -> Iterator[_State]:
    sigma, alpha, alpha_inv, hit, count, k = state
    if alpha[k] is not None:
        moves = [(alpha, alpha_inv, count)]
    else:
        moves = []
        choices = [j for j in range(count) if alpha_inv[j] is None]
        if count < size:
            choices.append(count)
        for j in choices:
            a, ai = list(alpha), list(alpha_inv)
            a[k], ai[j] = j, k
            if cycle is None or _chain_ok(a, ai, k, cycle):
                moves.append((a, ai, max(count, j + 1)))
    for a, ai, c in moves:
        choices = [j for j in range(c) if not hit[j]]
        if c < size:
            choices.append(c)
        for j in choices:
            s, h = list(sigma), list(hit)
            s[k], h[j] = j, True
            yield s, a, ai, h, max(c, j + 1), k + 1


def _complete(state: _State, size: int, cycle: int | None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    out = []
    stack = [state]
    while stack:
        current = stack.pop()
        sigma, alpha, _, _, count, k = current
        if k == count:
            # a stalled search is disconnected unless every dart is placed
            if count == size:
                out.append((tuple(sigma), tuple(alpha)))
            continue
        stack.extend(_step(current, size, cycle))
    return out


def _complete_branch(args: tuple[_State, int, int | None]) -> list:
    return _complete(*args)


def canonical_pairs(size: int, cycle: int | None = None, jobs: int | None = None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """
    All transitive pairs ``(sigma, alpha)`` on ``size`` darts in canonical numbering.

    Args:
        size (int): Number of darts, at least 1.
        cycle (int | None): Required length of every ``alpha`` cycle.
        jobs (int | None): Worker processes; the search is split by its first branch.

    Returns:
        list[tuple[tuple[int, ...], tuple[int, ...]]]: One pair per rooted class of any genus.
    """
    if size < 1:
        raise MapError("rooted objects need at least one dart")
    start: _State = ([None] * size, [None] * size, [None] * size, [False] * size, 1, 0)
    branches = list(_step(start, size, cycle))
    jobs = jobs or settings.JOBS
    if jobs > 1 and len(branches) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_complete_branch, [(b, size, cycle) for b in branches]))
    else:
        parts = [_complete(b, size, cycle) for b in branches]
    return sorted(pair for part in parts for pair in part)


def _encode(sigma: tuple[int, ...], alpha: tuple[int, ...]) -> str:
    return ",".join(str(x + 1) for x in sigma) + "/" + ",".join(str(x + 1) for x in alpha)


def _is_bipartite(m: DartMap) -> bool:
    dist = graph_distances(m, 0)
    return all((dist[m.origin(d)] + dist[m.target(d)]) % 2 == 1 for d in range(m.n_darts))


def _generate(family: OracleFamily, n: int, jobs: int | None) -> list[RootedClass]:
    out = []
    for sigma, alpha in canonical_pairs(family.unit * n, family.cycle, jobs):
        if family.hyper:
            h = hypermap_from_hyperdarts(sigma, alpha).hypermap
            if h.map.genus:
                continue
            if family.constellation and not constellation_check(h, family.cycle).ok:
                continue
            faces = len(h.dark_faces)
        else:
            m = DartMap(sigma, alpha)
            if m.genus:
                continue
            if family.bipartite and not _is_bipartite(m):
                continue
            faces = m.n_faces
        out.append(RootedClass(_encode(sigma, alpha), sigma, alpha, family.hyper, faces))
    return out


def _check_cap(family: OracleFamily, n: int) -> None:
    if n < 1:
        raise MapError("enumeration starts at size 1")
    cap = settings.MAX_HYPERMAP_DARKS if family.unit == 3 else settings.MAX_MAP_EDGES
    if n > cap:
        raise CapacityError(f"{family.name} enumeration is capped at size {cap}, got {n}")


def enumerate_rooted_maps(
    n_edges: int, constraints: Constraints = Constraints(), jobs: int | None = None
) -> EnumerationReport:
    """
    Enumerate rooted planar maps, or rooted planar hypermaps, with ``n_edges`` edges.

    Args:
        n_edges (int): Number of edges.
        constraints (Constraints): Filters; a hypermap degree switches to hyperdart generation.
        jobs (int | None): Worker processes for the search.

    Returns:
        EnumerationReport: One class per rooted isomorphism class.
    """
    p = constraints.degree
    if p is not None:
        if n_edges % p:
            raise MapError(f"a {p}-hypermap has a multiple of {p} edges")
        base = FAMILIES["ThreeConstellation" if constraints.p_constellation else "ThreeHypermap"]
        family = OracleFamily(
            f"{p}-constellation" if constraints.p_constellation else f"{p}-hypermap",
            True, p, p, constellation=bool(constraints.p_constellation),
        )
        _check_cap(base, n_edges // p)
        classes = _generate(family, n_edges // p, jobs)
    else:
        family = FAMILIES["BipartiteMap" if constraints.bipartite else "GeneralMap"]
        _check_cap(family, n_edges)
        classes = _generate(family, n_edges, jobs)
        if constraints.eulerian:
            classes = [
                c for c in classes
                if all(len(orbit) % 2 == 0 for orbit in c.structure().vertices)
            ]
    logger.info("enumerated %d rooted %s with %d edges", len(classes), family.name, n_edges)
    return EnumerationReport(family.name, n_edges, classes)


def enumerate_family(family: str, n: int, jobs: int | None = None) -> EnumerationReport:
    """
    Enumerate the rooted objects of a family at size ``n`` without profiling them.

    Args:
        family (str): Family tag; the two-parameter tags reuse their one-parameter objects.
        n (int): Size: edges, or dark faces for the 3-families.
        jobs (int | None): Worker processes for the search.

    Returns:
        EnumerationReport: One class per rooted isomorphism class.
    """
    fam = oracle_family(family)
    _check_cap(fam, n)
    report = EnumerationReport(family, n, _generate(fam, n, jobs))
    logger.info("enumerated %d rooted %s of size %d", report.total, family, n)
    return report


def _root_types(obj: DartMap | Hypermap, kind: str) -> Counter:
    m = obj.map if isinstance(obj, Hypermap) else obj
    out = Counter()
    for v in range(m.n_vertices):
        labels = directed_distances(obj, v) if isinstance(obj, Hypermap) else graph_distances(m, v)
        if kind == "root":
            key = (labels[m.origin(0)], labels[m.target(0)])
        else:
            key = face_type(m, m.face_of[0], labels, "ccw", start=m.phi[0]).entries
        out[key] += 1
    return out


def pointed_rooted_profile(
    n: int, family: str = "GeneralMap", kind: str = "root", jobs: int | None = None
) -> EnumerationReport:
    """
    Classify every pointed rooted object of a family by the distances around its root.

    Args:
        n (int): Size: edges, or dark faces for the 3-families.
        family (str): Family tag; the two-parameter tags reuse their one-parameter objects.
        kind (str): ``root`` for the pair ``(d(origin), d(target))`` of the root dart,
            ``face`` for the counterclockwise type of the root face read from the root's target.
        jobs (int | None): Worker processes for the search.

    Returns:
        EnumerationReport: Rooted classes with their pointed counts per type.
    """
    if kind not in ("root", "face"):
        raise MapError(f"unknown profile kind {kind!r}")
    fam = oracle_family(family)
    _check_cap(fam, n)
    classes = [
        RootedClass(c.encoding, c.sigma, c.alpha, c.hyper, c.faces, dict(_root_types(c.structure(), kind)))
        for c in _generate(fam, n, jobs)
    ]
    report = EnumerationReport(family, n, classes, kind)
    logger.info("profiled %d pointed rooted %s of size %d", report.pointed_total, family, n)
    return report


def cumulative_count(report: EnumerationReport, i: int, diagonal: bool = False, faces: int | None = None) -> int:
    """
    Pointed rooted objects whose root goes from ``j - 1`` to ``j`` (or stays at ``j``) with ``j <= i``.
    """
    if report.kind != "root":
        raise MapError("cumulative counts need a root profile")
    return sum(
        count
        for (a, b), count in report.by_type(faces).items()
        if b <= i and (a == b if diagonal else a == b - 1)
    )


def triple_count(report: EnumerationReport, triple: tuple[int, int, int], faces: int | None = None) -> int:
    """Pointed rooted objects whose root face type is ``triple`` shifted down by some ``m >= 0``."""
    if report.kind != "face":
        raise MapError("triple counts need a face profile")
    total = 0
    for seq, count in report.by_type(faces).items():
        if len(seq) != 3:
            continue
        shift = triple[0] - seq[0]
        if shift >= 0 and all(triple[j] - seq[j] == shift for j in range(3)):
            total += count
    return total


def _suitable_labellings(m: DartMap) -> Iterator[tuple[int, ...]]:
    order = []
    for d in bfs_order(m, 0):
        v = m.origin(d)
        if v not in order:
            order.append(v)
    labels: dict[int, int] = {order[0]: 0}

    def extend(k: int) -> Iterator[tuple[int, ...]]:
        if k == len(order):
            low = min(labels.values())
            yield tuple(labels[v] - low for v in range(m.n_vertices))
            return
        v = order[k]
        options = None
        for d in m.vertices[v]:
            u = m.target(d)
            if u in labels:
                near = {labels[u] - 1, labels[u] + 1}
                options = near if options is None else options & near
        for x in sorted(options or ()):
            labels[v] = x
            yield from extend(k + 1)
            del labels[v]

    yield from extend(1)


def enumerate_labelled(n: int, discipline: str = "suitable") -> list[LabelledMap | LabelledHypermap]:
    """
    Every rooted labelled instance of size ``n`` with minimal label 0.

    Args:
        n (int): Number of edges, at least 1.
        discipline (str): ``suitable`` for maps, ``well-labelled`` for hypermaps.

    Returns:
        list[LabelledMap | LabelledHypermap]: Rooted at dart 0.
    """
    if n < 1:
        raise BijectionError("labelled instances start at one edge")
    if discipline == "suitable":
        _check_cap(FAMILIES["BipartiteMap"], n)
        out = []
        for c in _generate(FAMILIES["BipartiteMap"], n, None):
            m = c.structure()
            out.extend(LabelledMap(m, labels) for labels in _suitable_labellings(m) if validate_suitable(m, labels))
        return out
    if discipline == "well-labelled":
        _check_cap(FAMILIES["GeneralHypermap"], n)
        out = []
        for c in _generate(FAMILIES["GeneralHypermap"], n, None):
            h = c.structure()
            for labels in itertools.product(range(n + 1), repeat=h.map.n_vertices):
                if min(labels) == 0 and validate_well_labelled(h, labels):
                    out.append(LabelledHypermap(h, labels))
        return out
    raise BijectionError(f"unknown labelling discipline {discipline!r}")


@dataclass(frozen=True)
class SamplerReport:
    """
    Goodness of fit of sampled pointed rooted maps against uniformity.

    Attributes:
        n (int): Number of edges.
        trials (int): Number of samples.
        classes (int): Number of pointed rooted classes.
        hits (int): Classes hit at least once.
        statistic (float): Chi-square statistic.
        p_value (float): Its p-value.
    """

    n: int
    trials: int
    classes: int
    hits: int
    statistic: float
    p_value: float


def pointed_map_key(mobile: Mobile) -> tuple:
    """Isomorphism class of the pointed rooted map a 2-mobile encodes."""
    decoded = mobile_to_hypermap(mobile)
    h = decoded.hypermap
    m = hypermap_to_map(h)
    index = {c: k for k, c in enumerate(h.canonical_darts)}
    at_pointed = next(d for d in h.map.vertices[decoded.pointed] if h.is_canonical(d))
    return map_code(m, pointed=m.origin(index[at_pointed]), root=index[decoded.root])


def sampler_check(
    n: int, trials: int, seed: int | None = None, counts: MobileCounts | None = None
) -> SamplerReport:
    """
    Sample pointed rooted maps through mobiles and test them for uniformity.

    Args:
        n (int): Number of edges.
        trials (int): Number of samples.
        seed (int | None): Seed of the master ``random.Random`` stream.
        counts (MobileCounts | None): A 2-mobile table covering labels up to ``1 + 4n``.

    Returns:
        SamplerReport: The chi-square statistic over the oracle's pointed rooted classes.
    """
    if trials < 1:
        raise CapacityError("the sampler check needs at least one trial")
    report = enumerate_rooted_maps(n)
    keys: dict[tuple, int] = {}
    for c in report.classes:
        m = c.structure()
        for v in range(m.n_vertices):
            keys.setdefault(map_code(m, pointed=v, root=0), len(keys))
    if counts is None or not counts.covers(Flavor(p=2), n, 1 + 4 * n):
        counts = counting_table(Flavor(p=2), n, 1 + 4 * n)
    rng = random.Random(seed)
    observed = [0] * len(keys)
    decoded: dict[str, tuple] = {}
    for _ in range(trials):
        mobile = sample_pointed_rooted(n, seed=rng.getrandbits(64), counts=counts)
        code = mobile.encode()
        if code not in decoded:
            decoded[code] = pointed_map_key(mobile)
        key = decoded[code]
        if key not in keys:
            raise VerificationError("sampler-class", {"mobile": code, "n": n})
        observed[keys[key]] += 1
    statistic, p_value = chisquare(observed)
    logger.info("sampler chi-square %.3f (p=%.4f) over %d classes", statistic, p_value, len(keys))
    return SamplerReport(n, trials, len(keys), sum(1 for x in observed if x), float(statistic), float(p_value))
