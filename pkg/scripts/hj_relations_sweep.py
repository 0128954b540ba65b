"""Endpoint-derivative sweep of the extremal action.

For the free particle and harmonic oscillator, extremizes trajectories over
a grid of final endpoints (X_f, lambda_f) and reports how well the
finite-difference endpoint derivatives of the action reproduce the momentum
and (minus) the energy, plus the first-order PDE they jointly satisfy.

Usage: python3 scripts/hj_relations_sweep.py [--samples 6]
"""
import argparse
import sys

from pilotwave.action_principles import BoundaryValueProblem, verify_hj_relations
from pilotwave.report import GridSpec
from pilotwave.scenarios import build


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=6,
                        help="grid samples per endpoint axis")
    args = parser.parse_args()

    ok = True
    for name in ("free-particle-hj", "harmonic-oscillator-hj"):
        sc = build(name)
        grid = GridSpec(sc.default_grid.bounds, (args.samples, args.samples))
        base = sc.bvp
        bvps = [BoundaryValueProblem(x0=base.x0, xf=[xf], lambda0=base.lambda0,
                                     lambdaf=float(lf), intervals=base.intervals)
                for xf, lf in grid.points()]
        reports = verify_hj_relations(sc.system, bvps)
        print(f"{name}  ({len(bvps)} endpoint pairs)")
        for key, tol in (("momentum", 5e-5), ("energy", 5e-5), ("pde", 1e-4)):
            rep = reports[key]
            status = "ok" if rep.max_abs < tol else "FAIL"
            ok = ok and rep.max_abs < tol
            print(f"  {key:>9}: max {rep.max_abs:.3e}  mean {rep.mean_abs:.3e}  "
                  f"[tol {tol:.0e}] {status}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
