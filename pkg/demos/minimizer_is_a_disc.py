"""Start the F_p minimiser from several shapes and watch each one round up.

Usage: python demos/minimizer_is_a_disc.py [OUT_DIR]

Prints, for every start and exponent, how far the final quotient sits from
the circle value and how round the result is, and writes before/after SVGs.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from pelastica import formats, generators as gen
from pelastica.curve_core import angle_from_points, area_gauss_green, is_convex
from pelastica.energy import circle_quotient, quotient_Qp
from pelastica.optimize import OptimizerConfig, minimize_Fp

STARTS = {
    "ellipse 2:1": gen.ellipse(2, 1, 1024),
    "egg": gen.egg(0.25, 1024),
    "three-lobed (nonconvex)": gen.peanut(0.15, 3, 1024),
    "rounded square": gen.rounded_square(0.15, 1024),
}


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    print(f"{'start':26s} {'p':>4s} {'Q_p start':>12s} {'Q_p final':>12s} {'circle':>12s} "
          f"{'circularity':>11s} {'convex':>6s}")
    for k, (name, pts) in enumerate(STARTS.items()):
        start = angle_from_points(pts, 256)
        for p in (1.5, 2.0, 3.0):
            res = minimize_Fp(start, OptimizerConfig(p=p, N=256, target_area=np.pi))
            print(f"{name:26s} {p:4g} {quotient_Qp(start, p):12.6f} {res.q_p:12.6f} "
                  f"{circle_quotient(p):12.6f} {res.circularity:11.2e} {str(is_convex(res.curve)):>6s}")
            if p == 2.0:
                svg = formats.render_svg([start.scaled(np.sqrt(np.pi / area_gauss_green(start))), res.curve],
                                         title=f"{name}: start and minimiser")
                (out / f"start{k}_p2.svg").write_text(svg)
    print(f"\nSVGs written to {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out"))
