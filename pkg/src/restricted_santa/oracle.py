"""Exhaustive optimum for desk-sized instances."""

from __future__ import annotations

from .errors import TooLarge
from .model import Instance

MAX_RESOURCES = 14
MAX_PLAYERS = 5


def exact_opt(
    instance: Instance, max_resources: int = MAX_RESOURCES, max_players: int = MAX_PLAYERS
) -> int:
    """Best achievable minimum bundle value, by depth-first search over assignments.

    Resources are placed in descending value order, each on one of its
    eligible players (a resource nobody wants is skipped: giving a resource
    away never lowers anyone's value). A branch is cut when even handing
    every remaining resource to every eligible player at once cannot beat
    the incumbent.
    """
    n, m = instance.n_players, instance.n_resources
    if m > max_resources or n > max_players:
        raise TooLarge(f"exact_opt guard: |R|={m} (max {max_resources}), |P|={n} (max {max_players})")
    if n == 0:
        return 0
    values = instance.values
    order = sorted(range(m), key=lambda j: (-values[j], j))
    takers = [[i for i in range(n) if j in instance.eligibility[i]] for j in order]
    # potential[k][i]: value still reachable by player i from order[k:]
    potential = [[0] * n for _ in range(m + 1)]
    for k in range(m - 1, -1, -1):
        potential[k] = list(potential[k + 1])
        for i in takers[k]:
            potential[k][i] += values[order[k]]

    current = [0] * n
    best = -1

    def search(k: int) -> None:
        nonlocal best
        bound = min(c + r for c, r in zip(current, potential[k]))
        if bound <= best:
            return
        if k == m:
            best = min(current)
            return
        v = values[order[k]]
        if not takers[k]:
            search(k + 1)
            return
        # poorest player first finds good incumbents early
        for i in sorted(takers[k], key=lambda i: (current[i], i)):
            current[i] += v
            search(k + 1)
            current[i] -= v

    search(0)
    return max(best, 0)
