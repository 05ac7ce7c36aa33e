#!/usr/bin/env python3
"""Repeat the random policies over several seeds and report the editing-cost
variance, the way randomized policies are usually reported.

Usage: python3 scripts/seed_variance.py [--pairs 100] [--seeds 1 2 3]
"""

import argparse
import statistics
import sys

from demo_campaign import synthetic_corpus

from imteval.cli import run_campaign
from imteval.metrics import aggregate


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=100)
    parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    parser.add_argument("--backend", default="noisy:we=0.4,vr=0.1")
    args = parser.parse_args()

    corpus = synthetic_corpus(args.pairs, seed=0)
    for policy in ("rand", "randi"):
        ecs = []
        for seed in args.seeds:
            logs = run_campaign(corpus, [policy], args.backend, seed=seed)
            ecs.append(aggregate(logs).overall.ec)
        var = statistics.pvariance(ecs) if len(ecs) > 1 else 0.0
        runs = ", ".join(f"{e:.2f}" for e in ecs)
        print(f"{policy}: ec per seed [{runs}]  mean {statistics.mean(ecs):.2f}  variance {var:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
