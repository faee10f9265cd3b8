"""Decision procedure for a guessed ``T`` and the binary search around it."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .certificate import DualCertificate, build_dual_certificate
from .engine import EdgeSpace, Matching, TraceSink, extend_matching
from .model import Allocation, Approximation, Instance, bundle_value


@dataclass
class DecisionOutcome:
    T: int
    success: bool
    allocation: Optional[Allocation] = None
    certificate: Optional[DualCertificate] = None
    tree_summary: Optional[dict] = None
    # one entry per extend call: (iterations, max A-edge distance)
    calls: list[tuple[int, int]] = field(default_factory=list)
    limit: int = 0

    @property
    def max_height(self) -> int:
        return max((h for _, h in self.calls), default=0)

    def to_json(self, instance: Instance, approx: Approximation) -> dict:
        out = {
            "T": self.T,
            "epsilon": str(approx),
            "outcome": "success" if self.success else "fail",
            "iterations": [it for it, _ in self.calls],
            "max_height": self.max_height,
            "distance_limit": self.limit,
        }
        if self.success:
            out["allocation"] = self.allocation.to_json(instance, self.T, approx)
        else:
            out["stalled_tree"] = self.tree_summary
            out["certificate"] = self.certificate.to_json(instance)
        return out


def decide(
    instance: Instance,
    T: int,
    approx: Approximation,
    *,
    trace: Optional[TraceSink] = None,
    check: bool = False,
) -> DecisionOutcome:
    """Match every player at threshold ``T/alpha``, or return a certificate that ``T`` is too high."""
    if T < 0:
        raise ValueError("T must be non-negative")
    if T == 0:
        return DecisionOutcome(0, True, Allocation.from_bundles(instance, {}))
    space = EdgeSpace(instance, T, approx)
    matching = Matching()
    outcome = DecisionOutcome(T, False)
    for _ in range(instance.n_players):
        result = extend_matching(space, matching, trace=trace, check=check)
        outcome.calls.append((result.iterations, result.max_height))
        outcome.limit = result.limit
        if not result.extended:
            outcome.certificate = build_dual_certificate(result.tree, instance, T, approx)
            outcome.tree_summary = result.tree.summary()
            return outcome
        matching = result.matching
    outcome.success = True
    outcome.allocation = Allocation.from_bundles(
        instance, {e.player: e.bundle for e in matching}
    )
    return outcome


def upper_bound(instance: Instance) -> int:
    return sum(instance.values) // instance.n_players


@dataclass
class SolveResult:
    T_star: int
    allocation: Allocation
    probes: list[DecisionOutcome]


def _decide_job(args):
    instance, T, approx = args
    return decide(instance, T, approx)


def solve(
    instance: Instance,
    approx: Approximation,
    *,
    check: bool = False,
    jobs: Optional[int] = None,
) -> SolveResult:
    """Largest probed ``T`` that succeeds, found by bisection on ``[0, sum(v)/|P|]``.

    ``lo`` is the best success so far (``T = 0`` always succeeds) and ``hi``
    the smallest failure (``upper + 1`` stands in for one). Every failure at
    ``T`` proves the optimum is below ``T``, so no monotonicity of
    :func:`decide` is assumed. With ``jobs`` set every candidate ``T`` is
    decided up front in a process pool and the bisection reads the table.
    """
    if instance.n_players < 1:
        raise ValueError("need at least one player")
    upper = upper_bound(instance)
    table: dict[int, DecisionOutcome] = {}
    if jobs:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            Ts = list(range(1, upper + 1))
            for T, out in zip(Ts, pool.map(_decide_job, [(instance, T, approx) for T in Ts])):
                table[T] = out

    lo, hi = 0, upper + 1
    best = decide(instance, 0, approx)
    probes = []
    while hi - lo > 1:
        mid = (lo + hi) // 2
        out = table[mid] if jobs else decide(instance, mid, approx, check=check)
        probes.append(out)
        if out.success:
            lo, best = mid, out
        else:
            hi = mid
    return SolveResult(lo, best.allocation, probes)


def verify_allocation(
    instance: Instance, allocation: Allocation, T: int, approx: Approximation
) -> bool:
    """Disjoint, eligibility-respecting bundles, each worth at least ``T/alpha``."""
    used: set[int] = set()
    for i in range(instance.n_players):
        bundle = allocation.bundles.get(i, frozenset())
        if used & bundle or not bundle <= instance.eligibility[i]:
            return False
        used |= bundle
        if not approx.reaches(bundle_value(instance, i, bundle), T):
            return False
    return set(allocation.bundles) <= set(range(instance.n_players))
