import math
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given

import restricted_santa.engine as engine
from brute import addable_edges, is_minimal
from restricted_santa.engine import (
    AlternatingTree,
    CollapseOutcome,
    Edge,
    EdgeSpace,
    Matching,
    attach_blockers,
    check_tree,
    collapse,
    distance_bound,
    extend_matching,
    find_min_distance_addable,
    lex_less,
    minimal_thin_bundle,
    search_radius,
    signature_of,
)
from restricted_santa.errors import InvariantBreach
from restricted_santa.model import (
    Approximation,
    Kind,
    generate_contested_instance,
    generate_instance,
    make_instance,
)

FAT, THIN = Kind.FAT, Kind.THIN


def E(player, *bundle, kind=THIN):
    return Edge(player, frozenset(bundle), kind)


# -- distance bound ---------------------------------------------------------


@pytest.mark.parametrize("n, limit", [(8, 17), (1, 1), (2, 7), (3, 9)])
def test_distance_bound_eps1(n, limit, eps1):
    assert distance_bound(n, eps1) == limit


def test_search_radius_base_two():
    # alpha = 7 gives base (7 - 1) / 3 = 2; 2^2 = 4
    assert search_radius(4, 2, 1) == 5
    assert search_radius(5, 2, 1) == 7


@given(st.integers(1, 5000), st.integers(1, 40), st.integers(1, 40))
def test_distance_bound_is_least_power(n, p, q):
    if p > q:
        p, q = q, p
    approx = Approximation(Fraction(p, q))
    D = (distance_bound(n, approx) - 1) // 2
    base = (approx.alpha - 1) / 3
    assert base**D >= n
    assert D == 0 or base ** (D - 1) < n


# -- minimal thin bundles ---------------------------------------------------


def test_minimal_thin_bundle_examples():
    assert minimal_thin_bundle([(0, 7), (1, 5), (2, 4), (3, 2)], 10, 1) == {0, 1}
    assert minimal_thin_bundle([(0, 4), (1, 3), (2, 2)], 10, 1) is None
    assert minimal_thin_bundle([(5, 2), (3, 2), (4, 2)], 3, 1) == {3, 4}


@given(
    st.dictionaries(st.integers(0, 30), st.integers(0, 9), max_size=12),
    st.integers(1, 60),
    st.integers(1, 5),
    st.randoms(use_true_random=False),
)
def test_minimal_thin_bundle_properties(cands, num, den, rnd):
    items = list(cands.items())
    got = minimal_thin_bundle(items, num, den)
    shuffled = items[:]
    rnd.shuffle(shuffled)
    assert minimal_thin_bundle(shuffled, num, den) == got
    thr = Fraction(num, den)
    if sum(cands.values()) < thr:
        assert got is None
    else:
        total = sum(cands[j] for j in got)
        assert total >= thr
        assert all(total - cands[j] < thr for j in got)


# -- signatures -------------------------------------------------------------


def test_lex_less_opening_layer_is_smaller():
    assert lex_less((-1, 0, -1, 1), (-1, 0))
    assert not lex_less((-1, 0), (-1, 0, -1, 1))


def test_lex_less_partial_collapse_is_smaller():
    before = (0, 0, -1, 2, -1, 0, -1, 3, -2, 1)
    after = (0, 0, -1, 1, -5, 7)
    assert lex_less(after, before)


def test_lex_less_irreflexive():
    assert not lex_less((0, 0, -1, 1, 0, 0), (0, 0, -1, 1, 0, 0))


@given(st.lists(st.integers(-5, 5), max_size=8), st.lists(st.integers(-5, 5), max_size=8))
def test_lex_less_is_strict_total_order(a, b):
    assert lex_less(a, b) + lex_less(b, a) + (a == b) == 1


def test_signature_empty_tree():
    assert signature_of(AlternatingTree(0)) == (0, 0)


# -- addable search ---------------------------------------------------------


def test_first_addable_in_inst_a(inst_a, eps1):
    space = EdgeSpace(inst_a, 10, eps1)
    tree = AlternatingTree(1)
    found = find_min_distance_addable(tree, space, distance_bound(2, eps1))
    assert found == (E(1, 0, kind=FAT), 0)
    # brute force: all three singletons are addable at distance 0, r1 has the smallest id
    brute = addable_edges(inst_a, tree, 10, 1, 5)
    assert sorted((d, min(b)) for d, _, b, _ in brute) == [(0, 0), (0, 1), (0, 2)]


def test_no_addable_when_tree_covers_everything(inst_b, eps1):
    space = EdgeSpace(inst_b, 10, eps1)
    tree = AlternatingTree(1)
    node = tree.add_a(E(1, 0, kind=FAT), 0)
    attach_blockers(tree, node, [E(0, 0, kind=FAT)])
    assert find_min_distance_addable(tree, space, 5) is None


def test_limit_cuts_off_thin_edges(eps1):
    inst = make_instance([1, 1], [{0, 1}])
    space = EdgeSpace(inst, 10, eps1)
    assert find_min_distance_addable(AlternatingTree(0), space, 1) == (E(0, 0, 1), 1)
    assert find_min_distance_addable(AlternatingTree(0), space, 0) is None


# -- blockers ---------------------------------------------------------------


def test_attach_thin_blocker(eps1):
    inst = make_instance([1, 1, 1, 1], [{1, 2}, {2, 3}])
    tree = AlternatingTree(1)
    matching = Matching([E(0, 1, 2)])
    e = E(1, 2, 3)
    node = tree.add_a(e, 1)
    blockers = matching.blockers(e.bundle)
    assert blockers == [E(0, 1, 2)]
    (b,) = attach_blockers(tree, node, blockers)
    assert b.parent is node and b.distance == 2 and node.blockers == [b]
    check_tree(tree, matching, EdgeSpace(inst, 10, eps1), 5)


def test_attach_fat_blocker_keeps_distance():
    tree = AlternatingTree(1)
    node = tree.add_a(E(1, 0, kind=FAT), 0)
    (b,) = attach_blockers(tree, node, [E(0, 0, kind=FAT)])
    assert b.distance == 0


def test_attach_rejects_second_parent():
    tree = AlternatingTree(2)
    a1 = tree.add_a(E(2, 0, 1), 1)
    attach_blockers(tree, a1, [E(0, 0, 5)])
    a2 = tree.add_a(E(2, 2, 3), 1)
    with pytest.raises(InvariantBreach):
        attach_blockers(tree, a2, [E(0, 3, 6)])


def test_attach_rejects_mixed_kinds():
    tree = AlternatingTree(1)
    node = tree.add_a(E(1, 0, 1), 1)
    with pytest.raises(InvariantBreach):
        attach_blockers(tree, node, [E(0, 0, kind=FAT)])


# -- collapse ---------------------------------------------------------------


def test_collapse_single_edge_at_root(eps1):
    inst = make_instance([5], [{0}])
    tree = AlternatingTree(0)
    matching = Matching()
    node = tree.add_a(E(0, 0, kind=FAT), 0)
    assert collapse(tree, matching, node) is CollapseOutcome.ROOT_MATCHED
    assert list(matching) == [E(0, 0, kind=FAT)]
    assert tree.a_edges == []


def _deep_tree():
    """Hand-built tree used by the partial-collapse tests.

    Players p0 (root), q1..q5 = 1..5; thin t1..t7 = 0..6 (value 1),
    fat f1, f2, f3 = 7, 8, 9 (value 2). T = 10, epsilon = 1, so fat means >= 2.
    """
    inst = make_instance(
        [1] * 7 + [2, 2, 2],
        [
            {0, 1},  # p0
            {0, 2, 7, 8},  # q1
            {1, 3, 4, 5},  # q2
            {4, 6},  # q3
            {8, 9},  # q4
            {9},  # q5
        ],
    )
    matching = Matching([E(1, 0, 2), E(2, 1, 3), E(3, 4, 6)])
    tree = AlternatingTree(0)
    a1 = tree.add_a(E(0, 0, 1), 1)
    attach_blockers(tree, a1, [E(1, 0, 2), E(2, 1, 3)])
    a2 = tree.add_a(E(2, 4, 5), 3)
    attach_blockers(tree, a2, [E(3, 4, 6)])
    return inst, tree, matching, a1


def test_partial_collapse_prunes_deeper_edges(eps1):
    inst, tree, matching, a1 = _deep_tree()
    space = EdgeSpace(inst, 10, eps1)
    check_tree(tree, matching, space, 5)
    node = tree.add_a(E(1, 7, kind=FAT), 2)
    assert signature_of(tree) == (0, 0, -1, 2, -1, 0, -1, 1, 0, 0)
    assert collapse(tree, matching, node) is CollapseOutcome.PARTIAL
    # hand count: only a1 and q2's blocker survive
    assert [a.edge for a in tree.a_edges] == [E(0, 0, 1)]
    assert list(tree.b_by_player) == [2]
    assert a1.blockers == [tree.b_by_player[2]]
    assert signature_of(tree) == (0, 0, -1, 1, 0, 0)
    assert set(matching) == {E(1, 7, kind=FAT), E(2, 1, 3), E(3, 4, 6)}
    check_tree(tree, matching, space, 5)


def test_partial_collapse_prunes_orphans(eps1):
    inst, tree, matching, a1 = _deep_tree()
    space = EdgeSpace(inst, 10, eps1)
    matching.add(E(4, 8, kind=FAT))
    matching.add(E(5, 9, kind=FAT))
    # q1 also waits on f2 (held by q4), and q4 on f3 (held by q5)
    x = tree.add_a(E(1, 8, kind=FAT), 2)
    attach_blockers(tree, x, [E(4, 8, kind=FAT)])
    z = tree.add_a(E(4, 9, kind=FAT), 2)
    attach_blockers(tree, z, [E(5, 9, kind=FAT)])
    check_tree(tree, matching, space, 5)
    node = tree.add_a(E(1, 7, kind=FAT), 2)
    before = signature_of(tree)
    assert before == (0, 0, -1, 2, -3, 2, -1, 1, 0, 0)
    assert collapse(tree, matching, node) is CollapseOutcome.PARTIAL
    assert [a.edge for a in tree.a_edges] == [E(0, 0, 1)]
    assert list(tree.b_by_player) == [2]
    after = signature_of(tree)
    assert after == (0, 0, -1, 1, 0, 0) and lex_less(after, before)
    check_tree(tree, matching, space, 5)


def test_collapse_rejects_matched_player_without_b_edge():
    tree = AlternatingTree(0)
    matching = Matching([E(0, 3, kind=FAT)])
    node = tree.add_a(E(0, 0, kind=FAT), 0)
    with pytest.raises(InvariantBreach):
        collapse(tree, matching, node)


# -- extend_matching --------------------------------------------------------


def test_extend_first_call_inst_a(inst_a, eps1):
    space = EdgeSpace(inst_a, 10, eps1)
    result = extend_matching(space, Matching(), check=True)
    assert result.extended
    assert list(result.matching) == [E(0, 0, kind=FAT)]


def test_extend_stalls_on_inst_b(inst_b, eps1):
    space = EdgeSpace(inst_b, 10, eps1)
    first = extend_matching(space, Matching(), check=True)
    assert first.extended
    second = extend_matching(space, first.matching, check=True)
    assert not second.extended
    assert second.root == 1
    assert addable_edges(inst_b, second.tree, 10, 1, second.limit) == []
    assert [b.edge for b in second.tree.b_edges] == [E(0, 0, kind=FAT)]


def test_extend_does_not_mutate_input(inst_b, eps1):
    space = EdgeSpace(inst_b, 10, eps1)
    matching = Matching([E(0, 0, kind=FAT)])
    extend_matching(space, matching)
    assert list(matching) == [E(0, 0, kind=FAT)]


def test_extend_private_fat_resources_never_block(eps1):
    inst = make_instance([5, 6, 7], [{0}, {1}, {2}])
    space = EdgeSpace(inst, 10, eps1)
    events = []
    matching = Matching()
    for _ in range(3):
        result = extend_matching(space, matching, trace=events.append, check=True)
        assert result.extended
        matching = result.matching
    assert len(matching) == 3
    assert {e["event"] for e in events} == {"add_edge", "root_matched"}


def test_extend_requires_unmatched_player(eps1):
    inst = make_instance([5], [{0}])
    with pytest.raises(ValueError):
        extend_matching(EdgeSpace(inst, 10, eps1), Matching([E(0, 0, kind=FAT)]))


# -- whole-run properties ---------------------------------------------------

instances = st.one_of(
    st.builds(
        generate_instance,
        st.integers(0, 2**32),
        st.integers(1, 4),
        st.integers(0, 9),
        st.integers(1, 20),
        st.sampled_from([Fraction(1, 3), Fraction(2, 3), Fraction(1)]),
    ),
    st.builds(
        generate_contested_instance,
        st.integers(0, 2**32),
        st.integers(3, 5),
        st.integers(8, 11),
        st.integers(2, 4),
        st.sampled_from([Fraction(3, 5), Fraction(4, 5)]),
        st.integers(2, 3),
        st.integers(10, 20),
    ),
)
epsilons = st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(1, 4)])


@given(instances, epsilons, st.data())
def test_search_agrees_with_brute_force(inst, eps, data):
    approx = Approximation(eps)
    T = data.draw(st.integers(1, max(1, sum(inst.values) // inst.n_players)))
    space = EdgeSpace(inst, T, approx)
    original = engine.find_min_distance_addable

    def checked(tree, space_, limit):
        found = original(tree, space_, limit)
        brute = addable_edges(inst, tree, T, eps, limit)
        if not brute:
            assert found is None
            return found
        best = min(d for d, *_ in brute)
        edge, dist = found
        assert dist == best
        at_best = [(p, b) for d, p, b, _ in brute if d == best]
        first_player = min(p for p, _ in at_best)
        assert edge.player == first_player
        assert is_minimal(inst.values, edge.bundle, T, eps)
        if edge.kind is FAT:
            assert edge.bundle == min((b for p, b in at_best if p == first_player), key=min)
        return found

    engine.find_min_distance_addable = checked
    try:
        matching = Matching()
        for _ in range(inst.n_players):
            result = extend_matching(space, matching, check=True)
            if not result.extended:
                break
            matching = result.matching
            assert len(matching) == len(result.matching)
    finally:
        engine.find_min_distance_addable = original


@given(instances, epsilons, st.data())
def test_extend_grows_matching_by_one(inst, eps, data):
    approx = Approximation(eps)
    T = data.draw(st.integers(1, max(1, sum(inst.values) // inst.n_players)))
    space = EdgeSpace(inst, T, approx)
    matching = Matching()
    for _ in range(inst.n_players):
        before = set(matching.by_player)
        result = extend_matching(space, matching, check=True)
        if not result.extended:
            break
        assert set(result.matching.by_player) == before | {result.root}
        assert result.max_height <= result.limit
        matching = result.matching
