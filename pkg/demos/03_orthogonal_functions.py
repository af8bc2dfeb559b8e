"""Rebuild the band operators from functions on the curve.

psi_n and phi_n are Laurent polynomials that take equal values at both
ends of every double point.  They are biorthogonal under a residue pairing,
and the matrices of multiplication by X and Y in this basis are the band
operators Q and P.  The cancellations are severe, so the work is done with
60 significant digits.
"""

from mobilium.baker_akhiezer import build_psi_phi, check_orthonormality, reconstruct_operators
from mobilium.couplings import CouplingSpec
from mobilium.numeric import Num
from mobilium.spectral import curve_polynomial, double_points, refine_numeric

spec = CouplingSpec.numeric(3, 3, {2: 0.1, 3: 0.05}, {2: 0.1, 3: 0.05})
curve = refine_numeric(spec, num=Num(60))
curve_polynomial(curve)
dps = double_points(curve)
ba = build_psi_phi(dps, 10)

print("Orthonormality, worst entry error:", f"{check_orthonormality(ba, 9).info['max_error']:.1e}")
ops = reconstruct_operators(ba, curve)
print("\nQ (rows 0..5):")
for row in ops.Q[:6]:
    print("  " + "  ".join(f"{complex(v).real:+.5f}" for v in row[:7]))
print("\nP subdiagonal R_n vs determinant ratio:")
for n in range(1, 6):
    h = ba.h
    print(f"  n={n}  P = {complex(ops.P[n][n - 1]).real:.12f}   ratio = {complex(curve.R * h[n - 1] * h[n + 1] / h[n] ** 2).real:.12f}")
