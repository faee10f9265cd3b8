"""Alternating-tree local search that grows a hypergraph matching by one.

Hyperedges pair a player with a minimal bundle worth at least ``T/alpha``:
either a single fat resource or a set of thin ones. The tree holds edges
we want to add (``A``) and the matched edges blocking them (``B``), and is
only ever grown with an addable edge of least distance from the root,
where a thin edge has length one and a fat edge length zero.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .errors import InvariantBreach
from .model import Approximation, Instance, Kind

TraceSink = Callable[[dict], None]


@dataclass(frozen=True)
class Edge:
    player: int
    bundle: frozenset[int]
    kind: Kind


def distance_bound(n_players: int, approx: Approximation) -> int:
    """Search radius ``2D + 1`` with ``D`` least such that ``((alpha-1)/3)^D >= n``."""
    # (alpha - 1) / 3 = (3q + p) / 3q
    return search_radius(n_players, 3 * approx.q + approx.p, 3 * approx.q)


def search_radius(n_players: int, base_num: int, base_den: int) -> int:
    """``2D + 1`` for the least ``D >= 0`` with ``(base_num/base_den)^D >= n_players``."""
    if base_num <= base_den:
        raise ValueError("base must exceed 1")
    D, power_num, power_den = 0, 1, 1
    while power_num < n_players * power_den:
        D += 1
        power_num *= base_num
        power_den *= base_den
    return 2 * D + 1


def minimal_thin_bundle(
    candidates: Iterable[tuple[int, int]], threshold_num: int, threshold_den: int
) -> Optional[frozenset[int]]:
    """Greedy minimal bundle from ``(resource, value)`` pairs.

    Takes candidates by descending value (ascending id on ties) until the
    sum reaches ``threshold_num / threshold_den``. Every member is worth at
    least the last one added and the sum before that addition was short, so
    dropping any member falls below the threshold.
    """
    total = 0
    chosen = []
    for rid, value in sorted(candidates, key=lambda c: (-c[1], c[0])):
        chosen.append(rid)
        total += value
        if total * threshold_den >= threshold_num:
            return frozenset(chosen)
    return None


class EdgeSpace:
    """Implicit hypergraph for one ``(instance, T, alpha)``; edges are built on demand."""

    def __init__(self, instance: Instance, T: int, approx: Approximation):
        if T < 1:
            raise ValueError("edges are only defined for T >= 1")
        self.instance = instance
        self.T = T
        self.approx = approx
        self.threshold = approx.threshold(T)
        self.kinds = tuple(
            Kind.FAT if approx.reaches(v, T) else Kind.THIN for v in instance.values
        )
        values = instance.values
        self._fat = []
        self._thin = []
        for elig in instance.eligibility:
            self._fat.append(sorted(j for j in elig if self.kinds[j] is Kind.FAT))
            self._thin.append(
                sorted(
                    (j for j in elig if self.kinds[j] is Kind.THIN),
                    key=lambda j: (-values[j], j),
                )
            )

    def fat_edge(self, player: int, is_free: Callable[[int], bool]) -> Optional[Edge]:
        for j in self._fat[player]:
            if is_free(j):
                return Edge(player, frozenset((j,)), Kind.FAT)
        return None

    def thin_edge(self, player: int, is_free: Callable[[int], bool]) -> Optional[Edge]:
        values = self.instance.values
        bundle = minimal_thin_bundle(
            ((j, values[j]) for j in self._thin[player] if is_free(j)), *self.threshold
        )
        return None if bundle is None else Edge(player, bundle, Kind.THIN)

    def is_edge(self, edge: Edge) -> bool:
        """Eligibility, kind consistency and exact minimality of ``edge``."""
        inst = self.instance
        if not edge.bundle or not edge.bundle <= inst.eligibility[edge.player]:
            return False
        if any(self.kinds[j] is not edge.kind for j in edge.bundle):
            return False
        if edge.kind is Kind.FAT and len(edge.bundle) != 1:
            return False
        total = sum(inst.values[j] for j in edge.bundle)
        if not self.approx.reaches(total, self.T):
            return False
        return all(not self.approx.reaches(total - inst.values[j], self.T) for j in edge.bundle)


class Matching:
    """Resource-disjoint edges, at most one per player."""

    def __init__(self, edges: Iterable[Edge] = ()):
        self.by_player: dict[int, Edge] = {}
        self.owner: dict[int, int] = {}
        for e in edges:
            self.add(e)

    def add(self, edge: Edge) -> None:
        if edge.player in self.by_player:
            raise InvariantBreach(f"player {edge.player} matched twice")
        clash = [j for j in edge.bundle if j in self.owner]
        if clash:
            raise InvariantBreach(f"resources {clash} already matched")
        self.by_player[edge.player] = edge
        for j in edge.bundle:
            self.owner[j] = edge.player

    def remove(self, edge: Edge) -> None:
        if self.by_player.get(edge.player) != edge:
            raise InvariantBreach(f"{edge} is not in the matching")
        del self.by_player[edge.player]
        for j in edge.bundle:
            del self.owner[j]

    def blockers(self, bundle: Iterable[int]) -> list[Edge]:
        players = sorted({self.owner[j] for j in bundle if j in self.owner})
        return [self.by_player[p] for p in players]

    def copy(self) -> "Matching":
        other = Matching()
        other.by_player = dict(self.by_player)
        other.owner = dict(self.owner)
        return other

    def __contains__(self, edge: Edge) -> bool:
        return self.by_player.get(edge.player) == edge

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.by_player[p] for p in sorted(self.by_player))

    def __len__(self) -> int:
        return len(self.by_player)


@dataclass(eq=False)
class AddEdge:
    edge: Edge
    distance: int
    blockers: list["BlockEdge"] = field(default_factory=list)


@dataclass(eq=False)
class BlockEdge:
    edge: Edge
    distance: int
    parent: AddEdge


class AlternatingTree:
    def __init__(self, root: int):
        self.root = root
        self.a_edges: list[AddEdge] = []
        self.b_by_player: dict[int, BlockEdge] = {}
        self._usage: Counter[int] = Counter()

    # -- queries -----------------------------------------------------------

    def is_free(self, resource: int) -> bool:
        return self._usage[resource] == 0

    def players(self) -> list[int]:
        return [self.root, *self.b_by_player]

    def player_distance(self, player: int) -> int:
        if player == self.root:
            return 0
        return self.b_by_player[player].distance

    @property
    def b_edges(self) -> list[BlockEdge]:
        return list(self.b_by_player.values())

    def height(self) -> int:
        """Largest distance of an ``A`` edge (0 for an empty tree)."""
        return max((a.distance for a in self.a_edges), default=0)

    def layer_count(self, side: str, kind: Kind, distance: int) -> int:
        nodes = self.a_edges if side == "A" else self.b_by_player.values()
        return sum(1 for n in nodes if n.edge.kind is kind and n.distance == distance)

    def resource_distances(self) -> dict[int, int]:
        dist: dict[int, int] = {}
        for node in [*self.a_edges, *self.b_by_player.values()]:
            for j in node.edge.bundle:
                if j not in dist or node.distance < dist[j]:
                    dist[j] = node.distance
        return dist

    def signature(self) -> tuple[int, ...]:
        return signature_of(self)

    # -- mutation ----------------------------------------------------------

    def add_a(self, edge: Edge, distance: int) -> AddEdge:
        node = AddEdge(edge, distance)
        self.a_edges.append(node)
        self._usage.update(edge.bundle)
        return node

    def add_b(self, edge: Edge, parent: AddEdge) -> BlockEdge:
        distance = parent.distance + (1 if edge.kind is Kind.THIN else 0)
        node = BlockEdge(edge, distance, parent)
        self.b_by_player[edge.player] = node
        parent.blockers.append(node)
        self._usage.update(edge.bundle)
        return node

    def remove_a(self, node: AddEdge) -> None:
        self.a_edges.remove(node)
        self._usage.subtract(node.edge.bundle)

    def remove_b(self, node: BlockEdge) -> None:
        del self.b_by_player[node.edge.player]
        node.parent.blockers.remove(node)
        self._usage.subtract(node.edge.bundle)

    def drop(self, node: AddEdge) -> None:
        """Remove an ``A`` edge together with the edges blocking it."""
        for b in list(node.blockers):
            self.remove_b(b)
        self.remove_a(node)

    def summary(self) -> dict:
        return {
            "root": self.root,
            "height": self.height(),
            "a_edges": len(self.a_edges),
            "b_edges": len(self.b_by_player),
            "signature": list(self.signature()),
        }


def signature_of(tree: AlternatingTree) -> tuple[int, ...]:
    """Layer-count vector ``(-|A^f_0|, |B^f_0|, -|A^t_1|, |B^t_2|, -|A^f_2|, |B^f_2|, ...)``.

    It runs through the deepest layer present; the implicit terminator
    after the last entry is handled by :func:`lex_less`.
    """
    deepest = max(
        (n.distance for n in [*tree.a_edges, *tree.b_by_player.values()]), default=0
    )
    counts: Counter = Counter()
    for a in tree.a_edges:
        counts["A", a.edge.kind, a.distance] += 1
    for b in tree.b_by_player.values():
        counts["B", b.edge.kind, b.distance] += 1
    sig = [-counts["A", Kind.FAT, 0], counts["B", Kind.FAT, 0]]
    for i in range(1, (deepest + 1) // 2 + 1):
        sig += [
            -counts["A", Kind.THIN, 2 * i - 1],
            counts["B", Kind.THIN, 2 * i],
            -counts["A", Kind.FAT, 2 * i],
            counts["B", Kind.FAT, 2 * i],
        ]
    return tuple(sig)


def lex_less(s1: Iterable[int], s2: Iterable[int]) -> bool:
    """Strict lexicographic order where each vector ends in ``+inf``."""
    return (*s1, math.inf) < (*s2, math.inf)


def find_min_distance_addable(
    tree: AlternatingTree, space: EdgeSpace, limit: int
) -> Optional[tuple[Edge, int]]:
    """Addable edge of least distance ``<= limit``.

    Players are scanned by ``(distance, id)``; at each player a fat edge
    (same distance) is tried before a thin one (distance + 1).
    """
    best: Optional[tuple[Edge, int]] = None
    order = sorted(tree.players(), key=lambda p: (tree.player_distance(p), p))
    for p in order:
        d = tree.player_distance(p)
        if best is not None and d >= best[1]:
            break
        if d <= limit:
            fat = space.fat_edge(p, tree.is_free)
            if fat is not None:
                best = (fat, d)
                continue
        if d + 1 <= limit and (best is None or d + 1 < best[1]):
            thin = space.thin_edge(p, tree.is_free)
            if thin is not None:
                best = (thin, d + 1)
    return best


def attach_blockers(
    tree: AlternatingTree, node: AddEdge, blockers: Iterable[Edge]
) -> list[BlockEdge]:
    attached = []
    for b in blockers:
        if b.player in tree.b_by_player:
            raise InvariantBreach(f"blocker of player {b.player} already has a parent")
        if b.player == tree.root:
            raise InvariantBreach("root cannot own a blocking edge")
        if b.kind is not node.edge.kind:
            raise InvariantBreach(f"{b.kind.value} edge blocks a {node.edge.kind.value} edge")
        attached.append(tree.add_b(b, node))
    return attached


class CollapseOutcome(enum.Enum):
    ROOT_MATCHED = "root_matched"
    PARTIAL = "partial_collapse"


def collapse(
    tree: AlternatingTree,
    matching: Matching,
    node: AddEdge,
    emit: Optional[Callable[[str, object, int], None]] = None,
) -> CollapseOutcome:
    """Swap blocker-free ``A`` edges into the matching toward the root.

    Stops when the root is matched, or when the parent of the last removed
    blocker still has blockers; then every ``A`` edge deeper than that
    blocker is dropped, followed by any ``A`` edge whose player is no
    longer the root or a ``B`` player.
    """
    last: Optional[BlockEdge] = None
    e = node
    while not e.blockers:
        own = tree.b_by_player.get(e.edge.player)
        if own is None:
            if e.edge.player != tree.root or e.edge.player in matching.by_player:
                raise InvariantBreach(f"edge of player {e.edge.player} has no B edge to replace")
            matching.add(e.edge)
            tree.remove_a(e)
            if emit:
                emit("root_matched", e.edge, e.distance)
            return CollapseOutcome.ROOT_MATCHED
        matching.remove(own.edge)
        matching.add(e.edge)
        tree.remove_a(e)
        parent = own.parent
        tree.remove_b(own)
        if emit:
            emit("swap", e.edge, e.distance)
        last = own
        e = parent

    assert last is not None
    for a in [a for a in tree.a_edges if a.distance > last.distance]:
        if a in tree.a_edges:
            tree.drop(a)
    changed = True
    while changed:
        changed = False
        for a in list(tree.a_edges):
            if a.edge.player != tree.root and a.edge.player not in tree.b_by_player:
                tree.drop(a)
                changed = True
    if emit:
        emit("partial_collapse", last.edge, last.distance)
    return CollapseOutcome.PARTIAL


def check_tree(tree: AlternatingTree, matching: Matching, space: EdgeSpace, limit: int) -> None:
    """Raise :class:`InvariantBreach` unless every tree/matching invariant holds."""

    def fail(msg):
        raise InvariantBreach(msg)

    check_matching(matching, space)
    a_nodes = tree.a_edges
    b_nodes = list(tree.b_by_player.values())
    seen: set[int] = set()
    for a in a_nodes:
        if seen & a.edge.bundle:
            fail("A edges overlap")
        seen |= a.edge.bundle
        if not space.is_edge(a.edge):
            fail(f"A edge {a.edge} is not a minimal edge")
        p = a.edge.player
        if p != tree.root and p not in tree.b_by_player:
            fail(f"A edge at player {p} outside the tree")
        expected = tree.player_distance(p) + (1 if a.edge.kind is Kind.THIN else 0)
        if a.distance != expected:
            fail(f"A edge distance {a.distance}, expected {expected}")
        if (a.distance % 2 == 0) != (a.edge.kind is Kind.FAT):
            fail("A edge parity")
        if a.distance > limit:
            fail(f"A edge at distance {a.distance} beyond limit {limit}")
        if not a.blockers:
            fail("A edge without blockers at rest")
        live = {b.edge for b in a.blockers}
        if live != set(matching.blockers(a.edge.bundle)):
            fail("live blockers differ from matched edges meeting the A edge")
    a_ids = {id(a) for a in a_nodes}
    for b in b_nodes:
        if b.edge.player == tree.root:
            fail("root owns a B edge")
        if b.edge not in matching:
            fail("B edge not in the matching")
        if id(b.parent) not in a_ids or b not in b.parent.blockers:
            fail("B edge parent link broken")
        if b.distance % 2:
            fail("B edge at odd distance")
        step = 1 if b.edge.kind is Kind.THIN else 0
        if b.distance != b.parent.distance + step:
            fail("B edge distance does not follow its parent")
        meets = [a for a in a_nodes if a.edge.bundle & b.edge.bundle]
        if meets != [b.parent]:
            fail("B edge must meet exactly its parent among A edges")
    usage = Counter()
    for n in [*a_nodes, *b_nodes]:
        usage.update(n.edge.bundle)
    if +usage != +tree._usage:
        fail("resource usage counter out of sync")


def check_matching(matching: Matching, space: EdgeSpace) -> None:
    owner: dict[int, int] = {}
    for p, e in matching.by_player.items():
        if e.player != p:
            raise InvariantBreach("matching keyed by wrong player")
        if not space.is_edge(e):
            raise InvariantBreach(f"matched {e} is not a minimal edge")
        for j in e.bundle:
            if j in owner:
                raise InvariantBreach(f"resource {j} matched twice")
            owner[j] = p
    if owner != matching.owner:
        raise InvariantBreach("resource owner index out of sync")


@dataclass
class ExtendResult:
    extended: bool
    matching: Matching
    tree: AlternatingTree
    root: int
    iterations: int
    max_height: int
    limit: int


def extend_matching(
    space: EdgeSpace,
    matching: Matching,
    *,
    trace: Optional[TraceSink] = None,
    check: bool = False,
) -> ExtendResult:
    """Try to match the smallest unmatched player; the input matching is not mutated.

    With ``check`` set, tree invariants are validated after every change and
    the signature must strictly decrease on every loop iteration that does
    not match the root.
    """
    instance = space.instance
    matching = matching.copy()
    unmatched = [i for i in range(instance.n_players) if i not in matching.by_player]
    if not unmatched:
        raise ValueError("every player is already matched")
    tree = AlternatingTree(unmatched[0])
    limit = distance_bound(instance.n_players, space.approx)

    def emit(event: str, edge: Optional[Edge], distance: int) -> None:
        if trace is None:
            return
        player = edge.player if edge is not None else tree.root
        bundle = sorted(edge.bundle) if edge is not None else []
        trace(
            {
                "event": event,
                "distance": distance,
                "player": instance.players[player],
                "bundle": [instance.resources[j] for j in bundle],
                "signature": list(tree.signature()),
            }
        )

    sig = tree.signature() if check else None
    iterations = max_height = 0
    while True:
        found = find_min_distance_addable(tree, space, limit)
        if found is None:
            emit("stalled", None, limit)
            return ExtendResult(False, matching, tree, tree.root, iterations, max_height, limit)
        iterations += 1
        edge, distance = found
        node = tree.add_a(edge, distance)
        max_height = max(max_height, distance)
        emit("add_edge", edge, distance)
        blockers = matching.blockers(edge.bundle)
        if blockers:
            for blocker in blockers:
                (b,) = attach_blockers(tree, node, [blocker])
                emit("attach_blockers", b.edge, b.distance)
        elif collapse(tree, matching, node, emit) is CollapseOutcome.ROOT_MATCHED:
            if check:
                check_matching(matching, space)
            return ExtendResult(True, matching, tree, tree.root, iterations, max_height, limit)
        if check:
            check_tree(tree, matching, space, limit)
            new = tree.signature()
            if not lex_less(new, sig):
                raise InvariantBreach(f"signature did not decrease: {sig} -> {new}")
            sig = new
