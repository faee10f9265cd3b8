"""Sweep a seeded corpus against the exact oracle and print a summary line per family.

    python3 scripts/run_corpus.py --family contested --epsilon 1/2 --check
"""

import argparse
import time
from collections import Counter

from restricted_santa.certificate import verify_dual_certificate
from restricted_santa.harness import ADVERSARIAL, CONTESTED, UNIFORM, corpus
from restricted_santa.model import Approximation
from restricted_santa.oracle import exact_opt
from restricted_santa.solver import decide, upper_bound

FAMILIES = {"uniform": UNIFORM, "contested": CONTESTED, "adversarial": ADVERSARIAL}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--family", choices=FAMILIES, default="uniform")
    parser.add_argument("--epsilon", default="1/1")
    parser.add_argument("--check", action="store_true", help="run the engine validator")
    args = parser.parse_args()

    approx = Approximation.parse(args.epsilon)
    config = FAMILIES[args.family]
    tally = Counter()
    heights = Counter()
    start = time.perf_counter()
    for seed, inst in corpus(config):
        # adversarial instances sit past the oracle's guard
        opt = exact_opt(inst) if args.family != "adversarial" else None
        for T in range(1, upper_bound(inst) + 1):
            out = decide(inst, T, approx, check=args.check)
            heights[out.max_height] += 1
            if out.success:
                tally["success"] += 1
                continue
            tally["fail"] += 1
            tally[f"D'={out.certificate.D_prime}"] += 1
            if opt is not None and T <= opt:
                tally["BAD unsound"] += 1
            if not verify_dual_certificate(inst, out.certificate):
                tally["BAD certificate"] += 1
    print(f"{args.family} eps={approx} in {time.perf_counter() - start:.1f}s")
    print("  outcomes:", dict(sorted(tally.items())))
    print("  heights:", dict(sorted(heights.items())))


if __name__ == "__main__":
    main()
