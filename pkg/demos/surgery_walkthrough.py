"""The three cut-and-glue constructions, one after the other.

Usage: python demos/surgery_walkthrough.py [OUT_DIR]

1. An egg is cut along the equal-area chord between parallel tangents; the
   cheaper half and its half-turn copy form a centrosymmetric oval with the
   same area and no more energy.
2. A circle gets a steeper tangent ramp near one point (and its antipode),
   which opens two parallel flat pieces; cutting them out drops area while
   energy stays put.
3. A peanut is reduced to two convex lobes and compared against the disc
   of their mean area.
"""

from __future__ import annotations

import sys
from pathlib import Path

from pelastica import formats, generators as gen
from pelastica.curve_core import angle_from_points
from pelastica.energy import CurvatureIntegrand
from pelastica.surgery import centrosymmetrize, notch_removal, perturb_theta_eps, reduce_two_convex_arcs

f = CurvatureIntegrand.power(2)


def main(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)

    egg = angle_from_points(gen.egg(0.25, 4096), 1024)
    rep = centrosymmetrize(egg, f)
    e1, e2 = rep.details["arc_energies"]
    print("centrosymmetrize (egg)")
    print(f"  arc energies {e1:.6f} / {e2:.6f}, kept arc {rep.details['kept']}")
    print(f"  energy {rep.energy_before:.6f} -> {rep.energy_after:.6f}")
    print(f"  area   {rep.area_before:.6f} -> {rep.area_after:.6f}")
    (out / "egg.svg").write_text(formats.render_svg([egg, rep.output], formats.surgery_overlays(rep)))

    circle = gen.circle_angle(1.0, 4096)
    print("\nperturbation and notch (unit circle, p = 2)")
    for eps in (0.1, 0.05, 0.025):
        bumped, est = perturb_theta_eps(circle, eps, 2.0)
        notch = notch_removal(bumped, f)
        print(f"  eps={eps:<6g} dE={est['dE_measured']:.3e} (bound {est['dE_bound']:.3e})  "
              f"dA={est['dA_measured']:+.3e}  notch removes {notch.area_before - notch.area_after:.4e} "
              f"of area, energy change {notch.energy_after - notch.energy_before:+.1e}")

    peanut = angle_from_points(gen.peanut(0.6, 2, 4096), 1024)
    reports, cmp = reduce_two_convex_arcs(peanut, f)
    print("\ntwo-lobe reduction (peanut r = 1 + 0.6 cos 2phi)")
    print(f"  E(peanut) = {cmp['E_input']:.5f}")
    print(f"  mean E over the two closed-up lobes = {cmp['mean_E_halves']:.5f}")
    print(f"  mean E over discs of the lobe areas = {cmp['mean_E_discs']:.5f}")
    print(f"  E(disc of the mean area)            = {cmp['E_disc']:.5f}")
    overlays = [o for r in reports for o in formats.surgery_overlays(r)]
    (out / "peanut.svg").write_text(formats.render_svg([peanut], overlays))
    (out / "peanut_lobes.svg").write_text(formats.render_svg([r.output for r in reports]))
    print(f"\nSVGs written to {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out"))
