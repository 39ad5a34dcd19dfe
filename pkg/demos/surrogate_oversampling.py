"""
Shrinking the circulant approximation error by oversampling
===========================================================

The fast solver replaces the exact sliding-window matrix with a wrapped
circulant surrogate.  Enlarging the working grid pushes the wrap-around
error to the border where the filter never reaches.  This sweep measures
recovery accuracy as the enlargement factor grows.
"""

import numpy as np

from cslr.giraf import SolverConfig, giraf_solve
from cslr.grids import IndexBox
from cslr.lifting import LiftingSpec
from cslr.models import SamplingOp, dirac_fourier, random_diracs, random_mask

# ----------------------------------------------------------------------
# Same Dirac recovery problem across 20 random instances per factor.
# factor 1.0 means no enlargement: the surrogate wraps hardest there.

box = IndexBox((-63,), (127,))
spec = LiftingSpec(box, IndexBox((-7,), (15,)))
factors = (1.0, 1.25, 1.5, 2.0)

print(f"{'factor':>6} {'median NMSE':>12} {'worst NMSE':>12}")
for factor in factors:
    errs = []
    for s in range(20):
        truth = dirac_fourier(
            random_diracs(4, seed=100 + s, min_separation=2 / 15), box)
        sampling = SamplingOp.measure(truth, random_mask(box, 0.5, seed=200 + s))
        cfg = SolverConfig(p=0.0, outer_iters=40, ls_solver="admm",
                           inner_iters=20, oversample=True,
                           oversample_factor=factor)
        errs.append(giraf_solve(spec, sampling, cfg,
                                ground_truth=truth).final_nmse)
    print(f"{factor:>6.2f} {np.median(errs):>12.3e} {max(errs):>12.3e}")

print("\nwithout enlargement the wrapped windows alias the signal;")
print("each step toward 2.0x removes another band of corrupted rows.")
