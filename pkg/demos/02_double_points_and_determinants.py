"""From the curve to R_n in closed form.

At numeric couplings the large-label limit defines a plane curve
parametrized by z.  It crosses itself at N points; the pairs (w, wbar)
with X(w) = X(wbar), Y(w) = Y(wbar) feed small determinants that give R_n
for every n.  Comparing against truncated series shows the gap shrinking
as the truncation order grows.
"""

from mobilium.couplings import CouplingSpec
from mobilium.determinants import R_n_det
from mobilium.mobiles import solve
from mobilium.spectral import curve_polynomial, double_points, refine_numeric

spec = CouplingSpec.numeric(4, 2, {2: 0.1}, {2: 0.1, 4: 0.05})
curve = refine_numeric(spec)
curve_polynomial(curve)
dps = double_points(curve)

print(f"R = {curve.R.real:.12f}, N = {dps.N} double points")
for w, wb in dps.pairs:
    print(f"  w = {complex(w):.6f}   wbar = {complex(wb):.6f}   |X(w) - X(wbar)| = {abs(curve.X(w) - curve.X(wb)):.1e}")

exact = {n: R_n_det(dps, curve.R, n).real for n in range(1, 7)}
print("\n  n   R_n (determinant)")
for n, v in exact.items():
    print(f"  {n}   {v:.12f}")

print("\nLargest |determinant - series| over n = 1..6:")
graded = spec.graded("t")
for D in (4, 6, 8, 10):
    sol = solve(graded, D, 6)
    gap = max(abs(sol.R(n).eval_numeric({"t": 1.0}) - exact[n]) for n in exact)
    print(f"  D = {D:<2}  {gap:.2e}")
