#!/usr/bin/env python3
"""Path-enumeration throughput over seeded random corpora.

Usage: python scripts/bench_enumeration.py [--sizes 1000,5000,10000] [--depth 12]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from xsign.corpus import ScenarioSpec, generate
from xsign.pathengine import build_index, enumerate_paths
from xsign.truststore import combined_anchors


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="1000,5000,10000")
    parser.add_argument("--depth", type=int, default=12)
    parser.add_argument("--seed", type=int, default=9)
    args = parser.parse_args()

    print(f"{'certs':>7} {'gen_s':>7} {'index_s':>8} {'enum_s':>7} "
          f"{'paths':>9} {'truncated':>9}")
    for size in (int(s) for s in args.sizes.split(",")):
        t0 = time.monotonic()
        bundle = generate(ScenarioSpec("random", seed=args.seed,
                                       mode="structural",
                                       params={"n": size, "xs_rate": 0.1}))
        t1 = time.monotonic()
        index = build_index(bundle.records)
        anchors = combined_anchors(bundle.stores)
        t2 = time.monotonic()
        paths = truncated = 0
        for record in bundle.records:
            result = enumerate_paths(record, index, max_depth=args.depth,
                                     anchors=anchors)
            paths += len(result.paths)
            truncated += result.truncated
        t3 = time.monotonic()
        print(f"{size:>7} {t1 - t0:>7.2f} {t2 - t1:>8.2f} {t3 - t2:>7.2f} "
              f"{paths:>9} {truncated:>9}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
