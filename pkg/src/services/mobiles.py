"""
Mobiles Module
This module provides planted mobiles, their validation, exhaustive enumeration,
integer counting tables and exactly uniform random generation.

A mobile is stored from a root white corner. Around every vertex the neighbours
are listed counterclockwise, parent first; the root white vertex lists its
black children counterclockwise from the root corner.
"""

from __future__ import annotations

import itertools
import logging
import random
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from src.conf.config import settings
from src.services.errors import CapacityError, MobileError
from src.services.labels import CyclicSequence, is_descending, is_lukasiewicz
from src.services.maps import DartMap, StarMap, build_map, perm_from_cycles


logger = logging.getLogger(__name__)

LABEL_FLOOR = 1


@dataclass(frozen=True)
class BlackNode:
    """
    A black vertex of a planted mobile.

    Attributes:
        children (tuple[WhiteNode, ...]): White children, counterclockwise after the parent.
    """

    children: tuple[WhiteNode, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.children) + 1


@dataclass(frozen=True)
class WhiteNode:
    """
    A labelled white vertex of a planted mobile, together with its subtree.

    Attributes:
        label (int): The label.
        children (tuple[BlackNode, ...]): Black children in counterclockwise order.
    """

    label: int
    children: tuple[BlackNode, ...] = ()

    @cached_property
    def _layout(self) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
        labels: list[int] = []
        stars: list[tuple[int, ...]] = []

        def visit(node: WhiteNode) -> int:
            me = len(labels)
            labels.append(node.label)
            for black in node.children:
                ring = [me]
                for child in black.children:
                    ring.append(visit(child))
                stars.append(tuple(ring))
            return me

        visit(self)
        return tuple(labels), tuple(stars)

    @property
    def white_labels(self) -> tuple[int, ...]:
        """Labels of the white vertices in preorder, root first."""
        return self._layout[0]

    @property
    def stars(self) -> tuple[tuple[int, ...], ...]:
        """For every black vertex, its white neighbours (preorder indices) counterclockwise from the parent."""
        return self._layout[1]

    @property
    def n_black(self) -> int:
        return len(self.stars)

    @property
    def n_edges(self) -> int:
        return sum(len(ring) for ring in self.stars)

    @property
    def min_label(self) -> int:
        return min(self.white_labels)

    def black_types(self) -> list[CyclicSequence]:
        """Clockwise types of the black vertices: parent, then the children reversed."""
        labels = self.white_labels
        return [
            CyclicSequence((labels[ring[0]],) + tuple(labels[w] for w in reversed(ring[1:])))
            for ring in self.stars
        ]

    def encode(self) -> str:
        """Canonical text form, e.g. ``1[2[1]]`` for the chain 1, 2, 1."""
        parts = [str(self.label)]
        for black in self.children:
            parts.append("[" + ",".join(child.encode() for child in black.children) + "]")
        return "".join(parts)

    def __str__(self) -> str:
        return self.encode()


Mobile = WhiteNode

_TOKEN = re.compile(r"-?\d+|[\[\],]")


def parse_mobile(text: str) -> Mobile:
    """
    Read the canonical text form back.

    Args:
        text (str): An encoding produced by ``WhiteNode.encode``.

    Returns:
        Mobile: The planted mobile.
    """
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != text.replace(" ", ""):
        raise MobileError(f"unreadable mobile {text!r}")
    pos = 0

    def white() -> WhiteNode:
        nonlocal pos
        if pos >= len(tokens) or not tokens[pos].lstrip("-").isdigit():
            raise MobileError(f"expected a label at token {pos} of {text!r}")
        label = int(tokens[pos])
        pos += 1
        blacks = []
        while pos < len(tokens) and tokens[pos] == "[":
            pos += 1
            children = []
            if tokens[pos] != "]":
                children.append(white())
                while tokens[pos] == ",":
                    pos += 1
                    children.append(white())
            if tokens[pos] != "]":
                raise MobileError(f"unbalanced brackets in {text!r}")
            pos += 1
            blacks.append(BlackNode(tuple(children)))
        return WhiteNode(label, tuple(blacks))

    try:
        root = white()
    except IndexError as err:
        raise MobileError(f"truncated mobile {text!r}") from err
    if pos != len(tokens):
        raise MobileError(f"trailing input in {text!r}")
    return root


@dataclass(frozen=True)
class Flavor:
    """
    Which mobiles are meant.

    Attributes:
        p (int | None): Degree of every black vertex; ``None`` allows any degree.
        descending (bool): Whether every black clockwise type has a unique rise.
        floating (bool): Whether any positive minimal label is allowed instead of exactly 1.
    """

    p: int | None = 2
    descending: bool = False
    floating: bool = False

    def __post_init__(self):
        if self.p is not None and self.p < 1:
            raise MobileError(f"black degree must be positive, got {self.p}")

    @property
    def reach(self) -> int:
        """Largest label move per unit of size."""
        return self.p if self.p is not None else 1

    def key(self) -> str:
        p = "any" if self.p is None else str(self.p)
        return f"p={p},descending={int(self.descending)},floating={int(self.floating)}"

    def size_of(self, mobile: Mobile) -> int:
        """Black vertices for a fixed degree, edges otherwise."""
        return mobile.n_black if self.p is not None else mobile.n_edges

    def weights(self, budget: int) -> Iterator[tuple[int, int]]:
        """Pairs ``(children, size)`` a black vertex may use within ``budget``."""
        if self.p is not None:
            if budget >= 1:
                yield self.p - 1, 1
            return
        for m in range(budget):
            yield m, m + 1


def validate(mobile: Mobile, flavor: Flavor) -> bool:
    """
    Check a planted mobile against a flavor.

    Args:
        mobile (Mobile): The mobile.
        flavor (Flavor): Degree, descent and label discipline.

    Returns:
        bool: Whether every black type is Łukasiewicz (descending when asked), the
        black degrees match and the minimal label is 1 (positive when floating).
    """
    for ring, seq in zip(mobile.stars, mobile.black_types()):
        if flavor.p is not None and len(ring) != flavor.p:
            return False
        if not is_lukasiewicz(seq):
            return False
        if flavor.descending and not is_descending(seq):
            return False
    low = mobile.min_label
    return low >= LABEL_FLOOR if flavor.floating else low == LABEL_FLOOR


def right_local_max_whites(mobile: Mobile) -> frozenset[int]:
    """
    White vertices all of whose right neighbours carry a smaller or equal label.

    A right neighbour of ``u`` follows ``u`` counterclockwise around a black vertex.

    Args:
        mobile (Mobile): The mobile.

    Returns:
        frozenset[int]: Preorder indices of the right local maxima.
    """
    labels = mobile.white_labels
    ok = [True] * len(labels)
    for ring in mobile.stars:
        for k, u in enumerate(ring):
            v = ring[(k + 1) % len(ring)]
            if labels[v] > labels[u]:
                ok[u] = False
    return frozenset(u for u, flag in enumerate(ok) if flag)


def shift_labels(mobile: Mobile, delta: int) -> Mobile:
    return WhiteNode(
        mobile.label + delta,
        tuple(
            BlackNode(tuple(shift_labels(child, delta) for child in black.children))
            for black in mobile.children
        ),
    )


def child_labels(parent: int, m: int, flavor: Flavor, floor: int = LABEL_FLOOR) -> list[tuple[int, ...]]:
    """
    Label tuples allowed around a black vertex whose parent is labelled ``parent``.

    Args:
        parent (int): Label of the parent white vertex.
        m (int): Number of children.
        flavor (Flavor): Descent discipline.
        floor (int): Smallest allowed label.

    Returns:
        list[tuple[int, ...]]: Children labels in counterclockwise order after the parent.
    """
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int], last: int) -> None:
        k = len(prefix)
        if k == m:
            if last < parent - 1:
                return
            if flavor.descending:
                seq = CyclicSequence((parent,) + tuple(reversed(prefix)))
                if not is_descending(seq):
                    return
            out.append(tuple(prefix))
            return
        low = max(floor, parent - 1 - (m - k - 1))
        for c in range(low, last + 2):
            prefix.append(c)
            extend(prefix, c)
            prefix.pop()

    extend([], parent)
    return out


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _planted(label: int, n: int, flavor: Flavor) -> Iterator[WhiteNode]:
    if n == 0:
        yield WhiteNode(label)
        return
    for k in range(1, n + 1):
        for first in _subtrees(label, k, flavor):
            for rest in _planted(label, n - k, flavor):
                yield WhiteNode(label, (first,) + rest.children)


def _subtrees(parent: int, n: int, flavor: Flavor) -> Iterator[BlackNode]:
    for m, weight in flavor.weights(n):
        for labels in child_labels(parent, m, flavor):
            for sizes in _compositions(n - weight, m):
                pools = [list(_planted(c, s, flavor)) for c, s in zip(labels, sizes)]
                for children in itertools.product(*pools):
                    yield BlackNode(tuple(children))


def enumerate_mobiles(flavor: Flavor, n: int, root_label: int = 1) -> list[Mobile]:
    """
    All planted mobiles of a flavor and size at a given root label.

    Args:
        flavor (Flavor): Degree, descent and label discipline.
        n (int): Number of black vertices, or of edges when the degree is free.
        root_label (int): Label of the root white vertex.

    Returns:
        list[Mobile]: Duplicate-free list sorted by canonical encoding.
    """
    if n < 0:
        raise MobileError("size must be nonnegative")
    if n > settings.MAX_MOBILE_BLACKS:
        raise CapacityError(f"mobile enumeration is capped at {settings.MAX_MOBILE_BLACKS}, got {n}")
    if root_label < LABEL_FLOOR:
        return []
    found = {m.encode(): m for m in _planted(root_label, n, flavor)}
    if not flavor.floating:
        found = {code: m for code, m in found.items() if m.min_label == LABEL_FLOOR}
    logger.debug("enumerated %d mobiles (%s, n=%d, root=%d)", len(found), flavor.key(), n, root_label)
    return [found[code] for code in sorted(found)]


def _integer_inverse(series: Sequence[int]) -> list[int]:
    inv = [1]
    for k in range(1, len(series)):
        inv.append(-sum(series[j] * inv[k - j] for j in range(1, k + 1)))
    return inv


def _product_coefficient(factors: Sequence[Sequence[int]], degree: int) -> int:
    acc = [1] + [0] * degree
    for f in factors:
        nxt = [0] * (degree + 1)
        for i, a in enumerate(acc):
            if a:
                for j in range(degree + 1 - i):
                    if f[j]:
                        nxt[i + j] += a * f[j]
        acc = nxt
    return acc[degree]


@dataclass(frozen=True)
class MobileCounts:
    """
    Counts of planted floating mobiles by size and root label.

    ``whites[k][l]`` is exact whenever ``l + k * reach <= max_label``.

    Attributes:
        flavor (Flavor): The flavor counted; the label discipline is always floating.
        order (int): Largest size counted.
        max_label (int): Largest label kept in the window.
        whites (tuple[tuple[int, ...], ...]): Planted counts indexed by size then label.
    """

    flavor: Flavor
    order: int
    max_label: int
    whites: tuple[tuple[int, ...], ...]

    def planted(self, n: int, label: int) -> int:
        if label < LABEL_FLOOR or label > self.max_label:
            return 0
        return self.whites[n][label]

    def plain(self, n: int, label: int) -> int:
        """Planted mobiles whose minimal label is exactly 1."""
        return self.planted(n, label) - self.planted(n, label - 1)

    @cached_property
    def blacks(self) -> tuple[tuple[int, ...], ...]:
        """``blacks[k][l]``: black subtrees of size ``k`` hanging from a white labelled ``l``."""
        columns = []
        for label in range(self.max_label + 1):
            series = [self.whites[k][label] for k in range(self.order + 1)]
            if not series[0]:
                columns.append([0] * (self.order + 1))
                continue
            inv = _integer_inverse(series)
            columns.append([0] + [-c for c in inv[1:]])
        return tuple(
            tuple(columns[label][k] for label in range(self.max_label + 1))
            for k in range(self.order + 1)
        )

    def covers(self, flavor: Flavor, n: int, max_label: int) -> bool:
        return (
            self.flavor.p == flavor.p
            and self.flavor.descending == flavor.descending
            and self.order >= n
            and self.max_label >= max_label
        )

    def rows(self) -> list[tuple[int, int, int]]:
        return [
            (k, label, self.whites[k][label])
            for k in range(self.order + 1)
            for label in range(LABEL_FLOOR, self.max_label + 1)
        ]

    @classmethod
    def from_rows(
        cls, flavor: Flavor, order: int, max_label: int, rows: Sequence[tuple[int, int, int]]
    ) -> MobileCounts:
        table = [[0] * (max_label + 1) for _ in range(order + 1)]
        for k, label, count in rows:
            table[k][label] = count
        return cls(flavor, order, max_label, tuple(tuple(r) for r in table))


def counting_table(flavor: Flavor, order: int, max_label: int | None = None) -> MobileCounts:
    """
    Count planted floating mobiles by dynamic programming over size and label.

    Args:
        flavor (Flavor): Degree and descent discipline.
        order (int): Largest size counted.
        max_label (int | None): Top of the label window, ``1 + order * reach`` by default.

    Returns:
        MobileCounts: The table.
    """
    if order < 0:
        raise MobileError("order must be nonnegative")
    if order > settings.MAX_SERIES_ORDER:
        raise CapacityError(f"counting tables are capped at {settings.MAX_SERIES_ORDER}, got {order}")
    top = max_label if max_label is not None else LABEL_FLOOR + order * flavor.reach
    labels = range(LABEL_FLOOR, top + 1)
    whites = [[0] * (top + 1) for _ in range(order + 1)]
    blacks = [[0] * (top + 1) for _ in range(order + 1)]
    for label in labels:
        whites[0][label] = 1
    shapes = {
        label: [
            (weight, tup)
            for m, weight in flavor.weights(order)
            for tup in child_labels(label, m, flavor)
            if all(lab <= top for lab in tup)
        ]
        for label in labels
    }
    for k in range(1, order + 1):
        for label in labels:
            total = 0
            for weight, tup in shapes[label]:
                if weight > k:
                    continue
                factors = [[whites[j][c] for j in range(k - weight + 1)] for c in tup]
                total += _product_coefficient(factors, k - weight)
            blacks[k][label] = total
        for label in labels:
            whites[k][label] = sum(blacks[j][label] * whites[k - j][label] for j in range(1, k + 1))
        logger.debug("counting table %s: size %d done", flavor.key(), k)
    logger.info("counted planted mobiles (%s) up to size %d on labels 1..%d", flavor.key(), order, top)
    table_flavor = Flavor(flavor.p, flavor.descending, floating=True)
    return MobileCounts(table_flavor, order, top, tuple(tuple(r) for r in whites))


def _sample_white(counts: MobileCounts, label: int, n: int, rng: random.Random) -> WhiteNode:
    children = []
    while n > 0:
        r = rng.randrange(counts.planted(n, label))
        for k in range(1, n + 1):
            weight = counts.blacks[k][label] * counts.planted(n - k, label)
            if r < weight:
                break
            r -= weight
        children.append(_sample_black(counts, label, k, rng))
        n -= k
    return WhiteNode(label, tuple(children))


def _sample_black(counts: MobileCounts, parent: int, n: int, rng: random.Random) -> BlackNode:
    options = []
    for m, weight in counts.flavor.weights(n):
        for labels in child_labels(parent, m, counts.flavor):
            for sizes in _compositions(n - weight, m):
                w = 1
                for c, s in zip(labels, sizes):
                    w *= counts.planted(s, c)
                if w:
                    options.append((w, labels, sizes))
    r = rng.randrange(sum(w for w, _, _ in options))
    for w, labels, sizes in options:
        if r < w:
            break
        r -= w
    return BlackNode(tuple(_sample_white(counts, c, s, rng) for c, s in zip(labels, sizes)))


def sample_uniform(
    flavor: Flavor,
    n: int,
    seed: int | None = None,
    root_label: int = 1,
    counts: MobileCounts | None = None,
) -> Mobile:
    """
    Draw a planted mobile uniformly at random.

    Args:
        flavor (Flavor): Degree, descent and label discipline.
        n (int): Size of the mobile.
        seed (int | None): Seed of the ``random.Random`` stream.
        root_label (int): Label of the root white vertex.
        counts (MobileCounts | None): A table covering the request, computed when absent.

    Returns:
        Mobile: A uniform element of ``enumerate_mobiles(flavor, n, root_label)``.
    """
    rng = random.Random(seed)
    return _draw(flavor, n, root_label, rng, counts)


def _draw(
    flavor: Flavor, n: int, root_label: int, rng: random.Random, counts: MobileCounts | None
) -> Mobile:
    top = root_label + n * flavor.reach
    if counts is None or not counts.covers(flavor, n, top):
        counts = counting_table(flavor, n, top)
    wanted = counts.planted(n, root_label) if flavor.floating else counts.plain(n, root_label)
    if not wanted:
        raise MobileError(f"no mobile of size {n} at root label {root_label} for {flavor.key()}")
    while True:
        mobile = _sample_white(counts, root_label, n, rng)
        if flavor.floating or mobile.min_label == LABEL_FLOOR:
            return mobile


def sample_pointed_rooted(
    n: int,
    seed: int | None = None,
    flavor: Flavor = Flavor(p=2),
    counts: MobileCounts | None = None,
) -> Mobile:
    """
    Draw a planted mobile with minimal label 1 uniformly over all root labels.

    The root label ``i`` is drawn with weight equal to the number of planted mobiles of
    size ``n`` at ``i`` with minimal label 1, then the mobile is drawn uniformly among them.
    Through the hypermap bijection these are the pointed rooted objects of size ``n``.

    Args:
        n (int): Size, at least 1.
        seed (int | None): Seed of the ``random.Random`` stream.
        flavor (Flavor): Degree and descent discipline.
        counts (MobileCounts | None): A table covering the request, computed when absent.

    Returns:
        Mobile: The planted mobile.
    """
    if n < 1:
        raise MobileError("pointed rooted sampling needs size at least 1")
    plain = Flavor(flavor.p, flavor.descending, floating=False)
    top_root = LABEL_FLOOR + n * plain.reach
    if counts is None or not counts.covers(plain, n, top_root + n * plain.reach):
        counts = counting_table(plain, n, top_root + n * plain.reach)
    rng = random.Random(seed)
    weights = [(i, counts.plain(n, i)) for i in range(LABEL_FLOOR, top_root + 1)]
    r = rng.randrange(sum(w for _, w in weights))
    for i, w in weights:
        if r < w:
            break
        r -= w
    return _draw(plain, n, i, rng, counts)


@dataclass(frozen=True)
class EmbeddedMobile:
    """
    A mobile drawn as a bipartite plane tree.

    Edge ``k`` has its white dart ``2k`` and its black dart ``2k + 1``; edges are numbered
    in preorder, so dart 0 opens the root corner.

    Attributes:
        star (StarMap): The tree with its black vertices marked.
        labels (tuple[int | None, ...]): Label of every vertex, ``None`` on black vertices.
        whites (tuple[int, ...]): Vertex id of every white vertex, in preorder.
        root_dart (int | None): Dart opening the root corner; ``None`` for a bare white vertex.
    """

    star: StarMap
    labels: tuple[int | None, ...]
    whites: tuple[int, ...]
    root_dart: int | None


def to_tree_map(mobile: Mobile) -> EmbeddedMobile:
    """
    Embed a planted mobile as a rotation system.

    Args:
        mobile (Mobile): The mobile.

    Returns:
        EmbeddedMobile: The tree, its labels and the root dart.
    """
    rings: list[list[int]] = []
    white_rings: list[tuple[int, int]] = []
    counter = itertools.count()

    def white(node: WhiteNode, parent_dart: int | None) -> None:
        ring = [] if parent_dart is None else [parent_dart]
        rings.append(ring)
        white_rings.append((len(rings) - 1, node.label))
        for black_node in node.children:
            k = next(counter)
            ring.append(2 * k)
            black(black_node, 2 * k + 1)

    def black(node: BlackNode, parent_dart: int) -> None:
        ring = [parent_dart]
        rings.append(ring)
        for child in node.children:
            k = next(counter)
            ring.append(2 * k + 1)
            white(child, 2 * k)

    white(mobile, None)
    n = 2 * mobile.n_edges
    if not n:
        return EmbeddedMobile(StarMap(DartMap((), ()), frozenset()), (mobile.label,), (0,), None)
    alpha = [d ^ 1 for d in range(n)]
    m = build_map(perm_from_cycles(n, rings), alpha)
    labels: list[int | None] = [None] * m.n_vertices
    whites = []
    for idx, label in white_rings:
        v = m.vertex_of[rings[idx][0]]
        labels[v] = label
        whites.append(v)
    black_ids = frozenset(v for v in range(m.n_vertices) if labels[v] is None)
    return EmbeddedMobile(StarMap(m, black_ids), tuple(labels), tuple(whites), 0)


def from_tree_map(
    tree: DartMap, labels: Sequence[int | None], black: frozenset[int], root_dart: int | None
) -> Mobile:
    """
    Read a planted mobile off a labelled bipartite plane tree.

    Args:
        tree (DartMap): A plane tree.
        labels (Sequence[int | None]): Label of every white vertex.
        black (frozenset[int]): The black vertices.
        root_dart (int | None): A white dart opening the root corner.

    Returns:
        Mobile: The planted mobile.
    """
    if not tree.n_darts:
        return WhiteNode(int(labels[0]))
    if tree.n_vertices != tree.n_edges + 1:
        raise MobileError("a mobile is a tree")
    if root_dart is None or tree.origin(root_dart) in black:
        raise MobileError("the root corner must sit at a white vertex")

    def white(v: int, darts: list[int]) -> WhiteNode:
        if v in black or labels[v] is None:
            raise MobileError("white vertices must alternate with black ones")
        return WhiteNode(int(labels[v]), tuple(black_node(tree.alpha[d]) for d in darts))

    def black_node(parent_dart: int) -> BlackNode:
        if tree.origin(parent_dart) not in black:
            raise MobileError("white vertices must alternate with black ones")
        children = []
        for d in tree.walk(tree.sigma, parent_dart)[1:]:
            back = tree.alpha[d]
            children.append(white(tree.origin(back), tree.walk(tree.sigma, back)[1:]))
        return BlackNode(tuple(children))

    return white(tree.origin(root_dart), tree.walk(tree.sigma, root_dart))
