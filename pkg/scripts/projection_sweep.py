"""Relative error of the three random projections as the sketch widens.

Generates low-rank density matrices with exponentially and linearly
decaying spectra, sketches them at a range of widths, and records the
entropy error per projection kind.

    python scripts/projection_sweep.py --n 512 --ranks 10 50 --out sweep.csv
"""

import argparse
import csv
import sys
import time

from vnentropy import (
    ProjectionSpec,
    RngStream,
    entropy_from_probs,
    generate_low_rank_density,
    relative_error,
    sketch_entropy,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=512)
    parser.add_argument("--ranks", type=int, nargs="+", default=[10, 50])
    parser.add_argument("--widths", type=int, nargs="+", default=[50, 100, 200, 400])
    parser.add_argument("--seeds", type=int, default=5)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["decay", "k", "kind", "s", "seed", "entropy", "rel_err", "wall_ms"])

    for decay in ("exponential", "linear"):
        for k in args.ranks:
            matrix, model = generate_low_rank_density(args.n, k, decay, RngStream(k))
            exact = entropy_from_probs(model.probs, 1e-14)
            for kind in ("gaussian", "srht", "countsketch"):
                for s in args.widths:
                    for seed in range(args.seeds):
                        t0 = time.perf_counter()
                        result = sketch_entropy(
                            matrix, k, ProjectionSpec(kind, s, RngStream(seed))
                        )
                        wall = (time.perf_counter() - t0) * 1e3
                        writer.writerow([
                            decay, k, kind, s, seed,
                            f"{result.entropy_tilde:.10g}",
                            f"{relative_error(result.entropy_tilde, exact):.6g}",
                            f"{wall:.2f}",
                        ])
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
