#!/usr/bin/env python3
"""Run the full Monte-Carlo inequality suite and summarize the margins.

Equivalent to `xpmcap verify --suite all`, but prints the bound-estimate
margin in standard errors for each stochastic check.

Run: python scripts/run_inequality_checks.py [--samples N] [--seed S]
"""

import argparse

from xpmcap import run_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    reports = run_suite("all", args.samples, args.seed)
    width = max(len(r.name) for r in reports)
    failures = 0
    for r in reports:
        if r.stderr > 0:
            margin = (r.bound - r.estimate) / r.stderr
            detail = f"margin = {margin:+8.2f} stderr"
        else:
            detail = f"estimate = {r.estimate:.6g}, bound = {r.bound:.6g}"
        print(f"{r.verdict.upper():4s} {r.name:<{width}s}  {detail}")
        failures += r.verdict == "fail"
    print(f"\n{len(reports) - failures}/{len(reports)} checks passed")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
