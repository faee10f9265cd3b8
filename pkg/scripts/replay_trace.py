"""Replay the hand-built three-player extension and print its trace as JSON Lines."""

import json

from restricted_santa.engine import EdgeSpace, extend_matching
from restricted_santa.harness import replay_setup

if __name__ == "__main__":
    inst, T, approx, matching = replay_setup()
    result = extend_matching(
        EdgeSpace(inst, T, approx), matching, trace=lambda e: print(json.dumps(e)), check=True
    )
    print(json.dumps({"extended": result.extended, "matching_size": len(result.matching)}))
