"""Time one solve on a large seeded instance and print its run report."""

import argparse
from fractions import Fraction

from restricted_santa.harness import run
from restricted_santa.model import Approximation, generate_contested_instance, generate_instance


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--players", type=int, default=50)
    parser.add_argument("--resources", type=int, default=200)
    parser.add_argument("--max-value", type=int, default=1000)
    parser.add_argument("--density", default="1/10")
    parser.add_argument("--contested", action="store_true")
    parser.add_argument("--epsilon", default="1/1")
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()

    density = Fraction(args.density)
    if args.contested:
        inst = generate_contested_instance(
            args.seed, args.players, args.resources, 50, density, 30, args.max_value
        )
    else:
        inst = generate_instance(args.seed, args.players, args.resources, args.max_value, density)
    _, report = run(inst, Approximation.parse(args.epsilon), check=args.check)
    print(
        f"T*={report.T_star} min={report.min_value} height={report.max_height}"
        f"/{report.distance_limit} probes={len(report.probes)} {report.wall_time:.2f}s"
    )


if __name__ == "__main__":
    main()
