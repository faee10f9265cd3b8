"""Dual certificates proving that the configuration LP at ``T`` is infeasible.

The configuration LP asks for a fractional choice of bundles worth at least
``T`` per player with every resource used at most once. Its dual maximises
``sum(y) - sum(z)`` subject to ``y_i <= z(C)`` for every bundle ``C`` worth
at least ``T`` to player ``i``, with ``y, z >= 0``. Any dual point with a
positive objective can be scaled without bound, so it proves the primal
infeasible, and hence that no allocation reaches ``T``.

A stalled alternating tree yields such a point directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .engine import AlternatingTree, distance_bound
from .errors import InvariantBreach, Malformed, TooLarge
from .model import Approximation, Instance, Kind, format_rational, parse_rational

MAX_RESOURCES = 20


@dataclass(frozen=True)
class DualCertificate:
    T: int
    approx: Approximation
    D_prime: int
    y: dict[int, Fraction]
    z: dict[int, Fraction]

    def objective(self) -> Fraction:
        return sum(self.y.values(), Fraction(0)) - sum(self.z.values(), Fraction(0))

    def scaled(self, c) -> "DualCertificate":
        c = Fraction(c)
        return DualCertificate(
            self.T,
            self.approx,
            self.D_prime,
            {i: c * v for i, v in self.y.items()},
            {j: c * v for j, v in self.z.items()},
        )

    def to_json(self, instance: Instance) -> dict:
        return {
            "T": self.T,
            "epsilon": str(self.approx),
            "D_prime": self.D_prime,
            "y": {instance.players[i]: format_rational(v) for i, v in sorted(self.y.items())},
            "z": {instance.resources[j]: format_rational(v) for j, v in sorted(self.z.items())},
        }


def certificate_from_json(instance: Instance, raw: Mapping) -> DualCertificate:
    try:
        T = raw["T"]
        approx = Approximation.parse(raw["epsilon"])
        D_prime = raw["D_prime"]
        y_raw, z_raw = raw["y"], raw["z"]
    except (KeyError, TypeError) as exc:
        raise Malformed("certificate", f"missing field {exc}") from exc
    if isinstance(T, bool) or not isinstance(T, int) or T < 1:
        raise Malformed("T", f"must be a positive integer, got {T!r}")
    if isinstance(D_prime, bool) or not isinstance(D_prime, int) or D_prime < 0:
        raise Malformed("D_prime", f"must be a non-negative integer, got {D_prime!r}")
    pidx = {p: i for i, p in enumerate(instance.players)}
    ridx = {r: j for j, r in enumerate(instance.resources)}
    y: dict[int, Fraction] = {}
    z: dict[int, Fraction] = {}
    for key, table, index, out in (("y", y_raw, pidx, y), ("z", z_raw, ridx, z)):
        if not isinstance(table, Mapping):
            raise Malformed(key, "must be an object")
        for name, text in table.items():
            if name not in index:
                raise Malformed(key, f"unknown id {name!r}")
            out[index[name]] = parse_rational(text)
    for i in range(instance.n_players):
        y.setdefault(i, Fraction(0))
    for j in range(instance.n_resources):
        z.setdefault(j, Fraction(0))
    return DualCertificate(T, approx, D_prime, y, z)


def build_dual_certificate(
    tree: AlternatingTree, instance: Instance, T: int, approx: Approximation
) -> DualCertificate:
    """Dual point read off a tree with no addable edge inside the search radius.

    The cut-off ``D'`` is the least value in ``[0, D]`` for which
    ``(alpha - 4)/3 * sum_{i<=D'} |B^t_2i| >= |B^t_{2D'+2}|``. Players within
    distance ``2D'`` get ``y = (alpha-1)/alpha``; fat resources within ``2D'``
    get the same ``z``, thin resources within ``2D'+2`` get ``z = v/T``.
    """
    D = (distance_bound(instance.n_players, approx) - 1) // 2
    thin_b = [tree.layer_count("B", Kind.THIN, 2 * i) for i in range(D + 2)]
    # (alpha - 4) / 3 = p / 3q
    p, q = approx.p, approx.q
    D_prime = None
    running = 0
    for d in range(D + 1):
        running += thin_b[d] if d >= 1 else 0
        if p * running >= 3 * q * thin_b[d + 1]:
            D_prime = d
            break
    if D_prime is None:
        raise InvariantBreach(f"no admissible cut-off in [0, {D}] for layers {thin_b}")

    share = (approx.alpha - 1) / approx.alpha
    y = {i: Fraction(0) for i in range(instance.n_players)}
    y[tree.root] = share
    for player, b in tree.b_by_player.items():
        if b.distance <= 2 * D_prime:
            y[player] = share
    z = {j: Fraction(0) for j in range(instance.n_resources)}
    for j, d in tree.resource_distances().items():
        if approx.reaches(instance.values[j], T):
            if d <= 2 * D_prime:
                z[j] = share
        elif d <= 2 * D_prime + 2:
            z[j] = Fraction(instance.values[j], T)
    return DualCertificate(T, approx, D_prime, y, z)


def undercut_configuration(
    instance: Instance, player: int, T: int, z: Mapping[int, Fraction], bound: Fraction
):
    """A bundle worth ``>= T`` to ``player`` whose ``z``-cost is below ``bound``, or ``None``.

    Depth-first over subsets of the eligible resources. Descent stops at a
    bundle that already reaches ``T`` (supersets only cost more), at a cost
    that already reaches ``bound``, and where the remaining value cannot
    reach ``T``. Zero-value resources are skipped for the same reason.
    """
    values = instance.values
    items = sorted(
        (j for j in instance.eligibility[player] if values[j] > 0),
        key=lambda j: (-values[j], j),
    )
    suffix = [0] * (len(items) + 1)
    for k in range(len(items) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + values[items[k]]
    chosen: list[int] = []

    def walk(k: int, value: int, cost: Fraction) -> bool:
        if cost >= bound:
            return False
        if value >= T:
            return True
        if value + suffix[k] < T:
            return False
        j = items[k]
        chosen.append(j)
        if walk(k + 1, value + values[j], cost + z.get(j, 0)):
            return True
        chosen.pop()
        return walk(k + 1, value, cost)

    return frozenset(chosen) if walk(0, 0, Fraction(0)) else None


def verify_dual_certificate(
    instance: Instance, cert: DualCertificate, max_resources: int = MAX_RESOURCES
) -> bool:
    """Check non-negativity, every dual constraint, and a positive objective."""
    if instance.n_resources > max_resources:
        raise TooLarge(f"verify guard: |R|={instance.n_resources} (max {max_resources})")
    if any(v < 0 for v in cert.y.values()) or any(v < 0 for v in cert.z.values()):
        return False
    if cert.objective() <= 0:
        return False
    for i in range(instance.n_players):
        yi = cert.y.get(i, Fraction(0))
        if yi == 0:
            continue
        if undercut_configuration(instance, i, cert.T, cert.z, yi) is not None:
            return False
    return True
