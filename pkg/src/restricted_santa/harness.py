"""Seeded corpora and run reports for experiments and the acceptance suite."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterator

from .engine import Edge, Matching, distance_bound
from .model import Approximation, Instance, Kind, generate_contested_instance, generate_instance
from .solver import SolveResult, solve


@dataclass(frozen=True)
class CorpusConfig:
    """Random instance family; per-instance sizes are drawn from ``seed``.

    ``family="uniform"`` uses :func:`generate_instance`. ``"contested"`` uses
    :func:`generate_contested_instance` with ``max_value`` as the rich
    resources' value and ``pool_max_value`` for the pool.
    """

    seed: int = 0
    count: int = 500
    family: str = "uniform"
    min_players: int = 1
    max_players: int = 5
    min_resources: int = 0
    max_resources: int = 12
    max_value: int = 20
    densities: tuple[Fraction, ...] = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
    pool_max_value: int = 3
    rich_resources: tuple[int, int] = (3, 4)


UNIFORM = CorpusConfig()

CONTESTED = CorpusConfig(
    seed=1,
    count=200,
    family="contested",
    min_players=4,
    max_players=5,
    min_resources=11,
    max_resources=12,
    densities=(Fraction(3, 5), Fraction(7, 10), Fraction(4, 5), Fraction(9, 10)),
    pool_max_value=4,
)

# dense eligibility, many thin resources; beyond the exact oracle's guard
ADVERSARIAL = CorpusConfig(
    seed=7,
    count=100,
    family="contested",
    min_players=5,
    max_players=8,
    min_resources=14,
    max_resources=20,
    max_value=60,
    densities=(Fraction(7, 10), Fraction(4, 5), Fraction(9, 10), Fraction(1)),
    pool_max_value=5,
    rich_resources=(2, 3),
)


def corpus(config: CorpusConfig) -> Iterator[tuple[int, Instance]]:
    rng = random.Random(config.seed)
    for _ in range(config.count):
        n = rng.randint(config.min_players, config.max_players)
        m = rng.randint(config.min_resources, config.max_resources)
        density = config.densities[rng.randrange(len(config.densities))]
        if config.family == "uniform":
            seed = rng.randrange(2**32)
            yield seed, generate_instance(seed, n, m, config.max_value, density)
        elif config.family == "contested":
            n_rich = rng.randint(*config.rich_resources)
            seed = rng.randrange(2**32)
            yield seed, generate_contested_instance(
                seed, n, m, config.pool_max_value, density, n_rich, config.max_value
            )
        else:
            raise ValueError(f"unknown family {config.family!r}")


@dataclass
class RunReport:
    instance_digest: str
    epsilon: str
    T_star: int
    min_value: int
    probes: list[dict]
    max_height: int
    distance_limit: int
    wall_time: float

    def to_json(self) -> dict:
        return asdict(self)


def run(instance: Instance, approx: Approximation, **kwargs) -> tuple[SolveResult, RunReport]:
    start = time.perf_counter()
    result = solve(instance, approx, **kwargs)
    elapsed = time.perf_counter() - start
    report = RunReport(
        instance_digest=instance.digest(),
        epsilon=str(approx),
        T_star=result.T_star,
        min_value=result.allocation.value,
        probes=[
            {"T": p.T, "success": p.success, "iterations": [it for it, _ in p.calls]}
            for p in result.probes
        ],
        max_height=max((p.max_height for p in result.probes), default=0),
        distance_limit=distance_bound(instance.n_players, approx),
        wall_time=elapsed,
    )
    return result, report


def replay_setup() -> tuple[Instance, int, Approximation, Matching]:
    """Small state replaying the textbook four-step run of one extension.

    Root ``p0`` can only take the thin pair ``{t2, t3}``, which meets both
    matched edges. ``q1`` then has a free fat resource at distance 2 while
    ``q2`` has a free thin pair at distance 3; the fat one goes first, is
    swapped in, and later the thin one closes an alternating path.
    At ``T = 10`` and ``epsilon = 1`` fat means value >= 2.
    """
    instance = Instance(
        ("p0", "q1", "q2"),
        ("t1", "t2", "t3", "t4", "t5", "t6", "f1"),
        (1, 1, 1, 1, 1, 1, 2),
        (frozenset({1, 2}), frozenset({0, 1, 6}), frozenset({2, 3, 4, 5})),
    )
    matching = Matching(
        [Edge(1, frozenset({0, 1}), Kind.THIN), Edge(2, frozenset({2, 3}), Kind.THIN)]
    )
    return instance, 10, Approximation(Fraction(1)), matching
