"""Sweep polynomial degree and probe count on a tridiagonal density matrix.

Desk-scale version of the error grids: for every (method, m, s, u mode)
cell the script records the relative error against the closed-form
spectrum, plus no-trace-estimation rows that isolate truncation error.

    python scripts/error_vs_terms.py --n 1024 --out error_grid.csv
"""

import argparse
import csv
import sys

from vnentropy import (
    EstimatorConfig,
    chebyshev_entropy,
    generate_tridiagonal_poisson,
    taylor_entropy,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1024)
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    matrix, model = generate_tridiagonal_poisson(args.n)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["method", "nte", "u_mode", "m", "s", "seed", "estimate", "rel_err", "wall_ms"])

    for method, run in (("taylor", taylor_entropy), ("chebyshev", chebyshev_entropy)):
        for u_mode in ("six", "raw"):
            for m in range(5, 31, 5):
                for nte, s_values in ((True, [0]), (False, [50, 100, 200, 300])):
                    for s in s_values:
                        for seed in range(args.seeds):
                            cfg = EstimatorConfig(
                                epsilon=0.1, delta=0.1, ell=model.p_min, u_mode=u_mode,
                                m_override=m, s_override=s, nte=nte, seed=seed,
                            )
                            rep = run(matrix, cfg, model)
                            writer.writerow([
                                method, int(nte), u_mode, m, s, seed,
                                f"{rep.estimate:.10g}", f"{rep.rel_err:.6g}", f"{rep.wall_ms:.2f}",
                            ])
                            if nte:
                                break  # deterministic, one seed is enough
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
