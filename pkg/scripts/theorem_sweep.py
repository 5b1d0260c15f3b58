#!/usr/bin/env python3
"""Exhaustive geometry-versus-oracle sweep over the bundled fixtures.

Runs the same cross-check as ``sandra verify`` on every fixture, with an
adjustable enumeration budget, and prints a one-line summary per fixture.
Exits nonzero if any counterexample appears.
"""

from __future__ import annotations

import argparse
import time

import sandra
from sandra.fixtures import fixture_path

# the 73-role fixture is excluded by default: exhaustive enumeration over it
# is combinatorially infeasible
DEFAULT_FIXTURES = ("fig", "panel", "mini_iraven", "mini_fmnist")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-entities", type=int, default=4)
    parser.add_argument("--max-depth", type=int, default=2)
    parser.add_argument("--max-children", type=int, default=2)
    parser.add_argument(
        "--fixtures",
        default=",".join(DEFAULT_FIXTURES),
        help="comma-separated fixture names",
    )
    args = parser.parse_args()

    failed = False
    for name in [f for f in args.fixtures.split(",") if f.strip()]:
        onto = sandra.load_ontology(fixture_path(name))
        start = time.perf_counter()
        situations = list(
            sandra.enumerate_situations(
                onto,
                max_entities=args.max_entities,
                max_depth=args.max_depth,
                max_children=args.max_children,
            )
        )
        report = sandra.verify_theorems(onto, situations)
        elapsed = time.perf_counter() - start
        verdict = "ok" if report.ok else f"{len(report.counterexamples)} COUNTEREXAMPLES"
        print(
            f"{name:12s} {report.situations:7d} situations"
            f" {report.pairs:8d} pairs  {elapsed:6.1f}s  {verdict}"
        )
        for ce in report.counterexamples[:5]:
            print(
                f"  {ce.description.name} vs {ce.situation.id}:"
                f" active {list(ce.active_mask)},"
                f" oracle satisfied={ce.verdict.satisfied}"
                f" nearly={ce.verdict.nearly_satisfied}"
            )
        failed = failed or not report.ok
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
