"""Two specializations where the determinants factor.

Constellations: rotating z by a p-th root of unity permutes the double
points, and the determinant splits into p products of smaller ones.
General maps: with bicolored faces of degree 2 as edges, R_i reduces to
ratios built from roots of a polynomial in three-step path counts.
"""

from mobilium.couplings import CouplingSpec
from mobilium.determinants import R_i_general, R_n_det, constellation_factor, general_map_char
from mobilium.spectral import curve_polynomial, double_points, refine_numeric

data = constellation_factor(3, {1: 0.02, 2: 0.005})
print(f"3-constellation: R = {complex(data.R).real:.10f}, {data.N0} orbit representatives")
for i in range(1, 5):
    print(f"  R_{i}: u-route {complex(data.R_i(i, 'u')).real:.12f}   v-route {complex(data.R_i(i, 'v')).real:.12f}")

g = {3: 0.05, 4: 0.03}
gm = general_map_char(g)
print(f"\nGeneral maps g = {g}: R = {complex(gm.R).real:.10f}, S = {complex(gm.S).real:.10f}")
curve = refine_numeric(CouplingSpec.numeric(2, 4, g, {2: 1}))
curve_polynomial(curve)
dps = double_points(curve)
for i in range(1, 5):
    print(f"  R_{i}: paths {complex(R_i_general(gm, i)).real:.12f}   determinant {complex(R_n_det(dps, curve.R, i)).real:.12f}")
