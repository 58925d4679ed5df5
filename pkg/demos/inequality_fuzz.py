"""Throw a few hundred random curves at the inequalities and look at the margins.

Usage: python demos/inequality_fuzz.py [N_CURVES]

The quotient F_p^(p/(p-1)) A is never below the circle value; curves that get
close to it are nearly round.  Margins are printed relative to the larger side.
"""

from __future__ import annotations

import sys

import numpy as np

from pelastica.bounds import fuzz, summarize


def main(n: int) -> None:
    results, circ = fuzz("mixed", n, (1.5, 2.0, 3.0), N=4096)
    for name, (ok, total) in summarize(results).items():
        print(f"{name:15s} {ok:5d}/{total:<5d} passed")
    isop = [c for c in results if c.name == "isop"]
    rel = np.array([c.rel_margin for c in isop])
    rnd = np.array([circ[c.curve_id] for c in isop])
    print("\nquotient margin against circularity (p = 1.5, 2, 3 pooled)")
    for lo, hi in ((0, 1e-3), (1e-3, 1e-2), (1e-2, 1e-1), (1e-1, np.inf)):
        sel = (rnd >= lo) & (rnd < hi)
        if sel.any():
            print(f"  circularity in [{lo:g}, {hi:g}): {sel.sum():4d} checks, "
                  f"margin {rel[sel].min():+.2e} .. {rel[sel].max():.2e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
