"""Prebuild and verify the sphere coverings the other tools reach for.

Usage: python scripts/build_net_cache.py CACHE_DIR [--fine]
"""

import argparse
import time

from sepscan.nets import build_net, verify_coverage


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("cache_dir")
    parser.add_argument("--fine", action="store_true", help="include the 0.002/0.001 nets")
    parser.add_argument("--samples", type=int, default=5000)
    args = parser.parse_args()

    deltas = [0.4, 0.1, 0.05, 0.01, 0.005]
    if args.fine:
        deltas += [0.002, 0.001]
    for delta in deltas:
        t0 = time.time()
        net = build_net(2, delta, cache_dir=args.cache_dir)
        report = verify_coverage(net, args.samples, seed=0)
        status = "ok" if report.passed else "COVERAGE GAP"
        print(
            f"m=2 delta={delta:<6} size={net.size:>9} method={net.method:<5} "
            f"max_gap={report.max_gap:.5f} {status} [{time.time() - t0:.1f}s]"
        )


if __name__ == "__main__":
    main()
