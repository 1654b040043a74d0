"""Cascade evidence for the reproduced spaces of the stationary examples.

For every polynomial the relative sup residual of the best fit by integer
shifts of phi on [-2, 2]^2 is printed, together with partition of unity,
refinement residual and successive level differences.

Usage: python3 scripts/cascade_evidence.py [--levels J]
"""

import argparse

from ellipsf import gallery as g
from ellipsf.masks import elliptic_mask
from ellipsf.polyops import MultiPoly
from ellipsf.scalingfn import cascade_eval, refinement_residual, verify_reproduction

x = MultiPoly.var(2, 0)
y = MultiPoly.var(2, 1)


def harmonic(k):
    """Real and imaginary parts of (x + i y)^k."""
    z = MultiPoly(2, {(1, 0): 1, (0, 1): 1j})
    p = z**k if k else MultiPoly.const(2, 1)
    return p.real_part(), p.imag_part()


def probes(extra):
    if extra is None:
        # generators of the space of the second matrix, with x*y as control
        return {
            "x*y (control)": x * y,
            "x^2-4xy": x * x - 4 * x * y,
            "y^2-2xy": y * y - 2 * x * y,
            "x^3+6x^2y-12xy^2": x**3 + 6 * x * x * y - 12 * x * y * y,
            "y^3-3x^2y+3xy^2": y**3 - 3 * x * x * y + 3 * x * y * y,
        }
    out = {"x^2 (control)": x * x, "x*y": x * y, "x^2-y^2": x * x - y * y}
    for k in range(3, extra + 1):
        re, im = harmonic(k)
        out[f"Re z^{k}"] = re
        out[f"Im z^{k}"] = im
    return out


# (builder, highest harmonic degree probed or None for the
# second matrix generators, levels divisor): |det| = 4 for
# diag(2,2), so half as many levels give the same grid resolution
CASES = {
    "quincunx": (lambda: elliptic_mask(g.QUINCUNX), 5, 1),
    "second matrix": (lambda: elliptic_mask(g.SECOND), None, 1),
    "diag(2,2)": (lambda: elliptic_mask(g.DIAG2), 4, 2),
    "quincunx r=6": (lambda: g.higher_quincunx(6), 9, 1),
    "quincunx r=8": (lambda: g.higher_quincunx(8), 9, 1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=8)
    args = ap.parse_args()
    for name, (build, top, div) in CASES.items():
        spec = build()
        J = max(1, args.levels // div)
        grid = cascade_eval(spec, J)
        print(f"== {name}, J={J}", flush=True)
        print(f"   partition of unity error {grid.partition_error():.2e}")
        print(f"   refinement residual      {refinement_residual(grid, spec):.2e}")
        print(f"   level differences        {', '.join(f'{d:.2e}' for d in grid.level_diffs[-4:])}")
        for label, P in probes(top).items():
            print(f"   {label:>14}: {verify_reproduction(grid, P).relative:.2e}", flush=True)


if __name__ == "__main__":
    main()
