"""Masks, orders and reproduced spaces of the bundled examples, by both jet routes.

Usage: python3 scripts/reproduce_examples.py [--numeric]
"""

import argparse
import time

import numpy as np

from ellipsf import gallery as g
from ellipsf.masks import elliptic_mask
from ellipsf.scalingfn import NumericJets, SymbolicJets
from ellipsf.strangfix import principal_angles, shift_invariant_space

EXAMPLES = {
    "quincunx": lambda: elliptic_mask(g.QUINCUNX),
    "second matrix": lambda: elliptic_mask(g.SECOND),
    "diag(2,2)": lambda: elliptic_mask(g.DIAG2),
    "quincunx r=6": lambda: g.higher_quincunx(6),
    "quincunx r=8": lambda: g.higher_quincunx(8),
    "quincunx m=2": lambda: elliptic_mask(g.QUINCUNX, order=2),
    "nonstationary quincunx": g.nonstat_quincunx,
    "nonstationary diag": g.nonstat_diag,
    "sum of powers quincunx": g.sum_of_powers_quincunx,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--numeric", action="store_true", help="also run the floating-point route")
    args = ap.parse_args()
    for name, build in EXAMPLES.items():
        spec = build()
        t0 = time.perf_counter()
        res = shift_invariant_space(SymbolicJets(spec), spec.default_lmax())
        print(f"== {name}  ({time.perf_counter() - t0:.2f}s)")
        print(f"   mask m0 (scale 0): {spec.mask_at(0)}")
        print(f"   order {res.order}, dims {list(res.report.dims)}")
        print(f"   space: {res.space}")
        print(f"   scale invariant: {res.scale_invariant}; affine part: {res.affine}")
        if args.numeric:
            num = shift_invariant_space(NumericJets(spec, 30), spec.default_lmax(), N=2, tol=1e-9)
            ex = np.array([[complex(x) for x in v] for v in res.space.vectors(res.order)]).T
            same = num.order == res.order and num.basis_float.shape[1] == ex.shape[1]
            angle = float(np.max(principal_angles(ex, num.basis_float))) if same else float("nan")
            print(f"   numeric route: order {num.order}, max principal angle {angle:.2e}")


if __name__ == "__main__":
    main()
