"""Instances, exact threshold arithmetic, allocations and I/O.

Players and resources are addressed internally by dense indices
``0..n-1`` in file order; the original string ids are kept for output.
"""

from __future__ import annotations

import enum
import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import Malformed


class Kind(enum.Enum):
    FAT = "fat"
    THIN = "thin"


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` or a bare integer exactly. Floats are refused."""
    if isinstance(text, bool):
        raise Malformed("rational", f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise Malformed("rational", f"not a rational: {text!r}")
    parts = text.strip().split("/")
    try:
        if len(parts) == 1:
            return Fraction(int(parts[0]))
        if len(parts) == 2:
            num, den = int(parts[0]), int(parts[1])
            if den == 0:
                raise Malformed("rational", f"zero denominator in {text!r}")
            return Fraction(num, den)
    except ValueError:
        pass
    raise Malformed("rational", f"not a rational: {text!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Approximation:
    """Approximation parameter; ``alpha = 4 + epsilon``, kept as rationals."""

    epsilon: Fraction

    def __post_init__(self):
        eps = Fraction(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps <= 1:
            raise Malformed("epsilon", f"must lie in (0, 1], got {eps}")

    @classmethod
    def parse(cls, text) -> "Approximation":
        return cls(parse_rational(text))

    @property
    def p(self) -> int:
        return self.epsilon.numerator

    @property
    def q(self) -> int:
        return self.epsilon.denominator

    @property
    def alpha(self) -> Fraction:
        return 4 + self.epsilon

    def threshold(self, T: int) -> tuple[int, int]:
        """``T / alpha`` as an exact ``(numerator, denominator)`` pair."""
        return T * self.q, 4 * self.q + self.p

    def reaches(self, value: int, T: int) -> bool:
        """Exact test ``value >= T / alpha``."""
        return value * (4 * self.q + self.p) >= T * self.q

    def __str__(self):
        return format_rational(self.epsilon)


@dataclass(frozen=True)
class Instance:
    players: tuple[str, ...]
    resources: tuple[str, ...]
    values: tuple[int, ...]
    eligibility: tuple[frozenset[int], ...]

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    def eligible(self, player: int, resource: int) -> bool:
        return resource in self.eligibility[player]

    def to_json(self) -> dict:
        return {
            "players": list(self.players),
            "resources": [
                {"id": rid, "value": v} for rid, v in zip(self.resources, self.values)
            ],
            "eligibility": {
                pid: [self.resources[j] for j in sorted(self.eligibility[i])]
                for i, pid in enumerate(self.players)
            },
        }

    def dumps(self) -> str:
        return dumps(self.to_json())

    def digest(self) -> str:
        canonical = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def dumps(obj) -> str:
    """JSON text used for every file this package writes."""
    return json.dumps(obj, indent=2) + "\n"


def validate_instance(raw: Mapping) -> Instance:
    """Normalize a parsed instance description, or raise :class:`Malformed`."""
    problems: list[tuple[str, str]] = []
    if not isinstance(raw, Mapping):
        raise Malformed("instance", "top level must be an object")
    for key in ("players", "resources", "eligibility"):
        if key not in raw:
            problems.append((key, "missing"))
    if problems:
        raise Malformed(*problems[0], violations=problems)

    players = raw["players"]
    if not isinstance(players, list) or not all(isinstance(p, str) for p in players):
        problems.append(("players", "must be a list of string ids"))
        players = []
    elif len(set(players)) != len(players):
        problems.append(("players", "duplicate player id"))

    rids: list[str] = []
    values: list[int] = []
    resources = raw["resources"]
    if not isinstance(resources, list):
        problems.append(("resources", "must be a list"))
        resources = []
    for entry in resources:
        if not isinstance(entry, Mapping) or "id" not in entry or "value" not in entry:
            problems.append(("resources", f"bad entry {entry!r}"))
            continue
        rid, value = entry["id"], entry["value"]
        if not isinstance(rid, str):
            problems.append(("resources", f"resource id must be a string: {rid!r}"))
            continue
        if isinstance(value, bool) or not isinstance(value, int):
            problems.append(("value", f"{rid}: value must be an integer, got {value!r}"))
            continue
        if value < 0:
            problems.append(("value", f"{rid}: negative value {value}"))
            continue
        rids.append(rid)
        values.append(value)
    if len(set(rids)) != len(rids):
        problems.append(("resources", "duplicate resource id"))

    index = {rid: j for j, rid in enumerate(rids)}
    elig_raw = raw["eligibility"]
    eligibility: list[frozenset[int]] = []
    if not isinstance(elig_raw, Mapping):
        problems.append(("eligibility", "must be an object"))
        elig_raw = {}
    for pid in elig_raw:
        if pid not in players:
            problems.append(("eligibility", f"unknown player {pid!r}"))
    for pid in players:
        listed = elig_raw.get(pid, [])
        if not isinstance(listed, list):
            problems.append(("eligibility", f"{pid}: must be a list"))
            listed = []
        members = set()
        for rid in listed:
            if rid not in index:
                problems.append(("eligibility", f"{pid}: unknown resource {rid!r}"))
            else:
                members.add(index[rid])
        eligibility.append(frozenset(members))

    if problems:
        raise Malformed(*problems[0], violations=problems)
    return Instance(tuple(players), tuple(rids), tuple(values), tuple(eligibility))


def load_instance(path) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise Malformed("instance", f"invalid JSON: {exc}") from exc
    return validate_instance(raw)


def make_instance(values: Iterable[int], eligibility: Iterable[Iterable[int]]) -> Instance:
    """Index-based constructor with ids ``p1..``/``r1..``; handy in tests."""
    values = tuple(values)
    elig = tuple(frozenset(e) for e in eligibility)
    return Instance(
        tuple(f"p{i + 1}" for i in range(len(elig))),
        tuple(f"r{j + 1}" for j in range(len(values))),
        values,
        elig,
    )


def bundle_value(instance: Instance, player: int, bundle: Iterable[int]) -> int:
    elig = instance.eligibility[player]
    return sum(instance.values[j] for j in bundle if j in elig)


def classify_resource(value: int, T: int, approx: Approximation) -> Kind:
    return Kind.FAT if approx.reaches(value, T) else Kind.THIN


def generate_instance(
    seed: int,
    n_players: int,
    n_resources: int,
    max_value: int,
    density: Fraction = Fraction(1, 2),
) -> Instance:
    """Seeded random instance.

    Values are uniform in ``[1, max_value]``. Each player/resource pair is
    eligible with probability ``density`` (sampled exactly as an integer
    draw); resources no one wants are then handed to a random player.
    """
    density = Fraction(density)
    if n_players < 1 or n_resources < 0 or max_value < 1:
        raise Malformed("generator", "need n_players >= 1, n_resources >= 0, max_value >= 1")
    if not 0 < density <= 1:
        raise Malformed("density", f"must lie in (0, 1], got {density}")
    rng = random.Random(seed)
    values = [rng.randint(1, max_value) for _ in range(n_resources)]
    num, den = density.numerator, density.denominator
    elig: list[set[int]] = [set() for _ in range(n_players)]
    for i in range(n_players):
        for j in range(n_resources):
            if rng.randrange(den) < num:
                elig[i].add(j)
    for j in range(n_resources):
        if not any(j in e for e in elig):
            elig[rng.randrange(n_players)].add(j)
    return make_instance(values, elig)


def generate_contested_instance(
    seed: int,
    n_players: int,
    n_resources: int,
    pool_max_value: int,
    density: Fraction,
    n_rich: int,
    rich_value: int,
) -> Instance:
    """Seeded instance where all but one player fight over a pool of small resources.

    The last player alone owns ``n_rich`` resources of value ``rich_value``;
    they lift the average-value bound on ``T`` so that the pool players are
    short of value at ``T/alpha`` and the search has to build deep trees.
    Pool values are uniform in ``[1, pool_max_value]`` and pool eligibility
    follows ``density``; pool resources nobody wants go to a random pool player.
    """
    density = Fraction(density)
    if n_players < 2 or not 0 <= n_rich <= n_resources or pool_max_value < 1 or rich_value < 1:
        raise Malformed("generator", "need >= 2 players, 0 <= n_rich <= n_resources, positive values")
    if not 0 < density <= 1:
        raise Malformed("density", f"must lie in (0, 1], got {density}")
    rng = random.Random(seed)
    pool = n_resources - n_rich
    k = n_players - 1
    values = [rng.randint(1, pool_max_value) for _ in range(pool)] + [rich_value] * n_rich
    num, den = density.numerator, density.denominator
    elig: list[set[int]] = [
        {j for j in range(pool) if rng.randrange(den) < num} for _ in range(k)
    ]
    for j in range(pool):
        if not any(j in e for e in elig):
            elig[rng.randrange(k)].add(j)
    elig.append(set(range(pool, n_resources)))
    return make_instance(values, elig)


@dataclass(frozen=True)
class Allocation:
    """Player index -> bundle of resource indices, plus the objective."""

    bundles: dict[int, frozenset[int]]
    value: int

    @classmethod
    def from_bundles(cls, instance: Instance, bundles: Mapping[int, Iterable[int]]) -> "Allocation":
        full = {i: frozenset(bundles.get(i, ())) for i in range(instance.n_players)}
        value = min((bundle_value(instance, i, b) for i, b in full.items()), default=0)
        return cls(full, value)

    def to_json(self, instance: Instance, T: int, approx: Approximation) -> dict:
        return {
            "T": T,
            "epsilon": str(approx),
            "min_value": self.value,
            "bundles": {
                instance.players[i]: [instance.resources[j] for j in sorted(b)]
                for i, b in sorted(self.bundles.items())
            },
        }


def allocation_from_json(instance: Instance, raw: Mapping) -> Allocation:
    """Read the ``bundles`` part of an allocation file (ids -> indices)."""
    if not isinstance(raw, Mapping) or not isinstance(raw.get("bundles"), Mapping):
        raise Malformed("bundles", "allocation must carry a bundles object")
    pidx = {p: i for i, p in enumerate(instance.players)}
    ridx = {r: j for j, r in enumerate(instance.resources)}
    bundles: dict[int, list[int]] = {}
    for pid, rids in raw["bundles"].items():
        if pid not in pidx:
            raise Malformed("bundles", f"unknown player {pid!r}")
        if not isinstance(rids, list) or any(r not in ridx for r in rids):
            raise Malformed("bundles", f"{pid}: unknown resource in {rids!r}")
        bundles[pidx[pid]] = [ridx[r] for r in rids]
    # keep duplicates visible to the verifier: frozenset would hide a resource listed twice
    alloc = Allocation.from_bundles(instance, bundles)
    dup = {i: len(v) != len(set(v)) for i, v in bundles.items()}
    if any(dup.values()):
        raise Malformed("bundles", "resource listed twice in one bundle")
    return alloc
