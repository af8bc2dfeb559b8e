"""Count labelled mobiles for quadrangulations and watch R_i settle.

R_i is the generating function of mobiles whose labels stay at or above
1 - i.  Near the floor the count is smaller; far away it freezes into the
large-label limit R, which has a closed form for quadrangulations.
"""

from mobilium.couplings import CouplingSpec
from mobilium.mobiles import limits, solve
from mobilium.oracle import enumerate_mobiles

spec = CouplingSpec.symbolic(4, 2, black=[2, 4])
sol = solve(spec, 6, 16)

print("R_i truncated at total degree 6")
for i in (1, 2, 3, 16):
    print(f"  R_{i:<2} = {sol.R(i)}")

lim = limits(sol)
print("\nLarge-label limit:", lim.R)
print("Coefficient of g2^2*gt4 in R:", lim.R.coeff("g2^2*gt4"))

# the same low-degree numbers from literal tree enumeration
counts = enumerate_mobiles(spec, 3, ("R", 1))
print("\nBrute-force counts for R_1 up to three weighted vertices:")
for m, c in sorted(counts.counts.items(), key=lambda t: (t[0].degree, str(t[0]))):
    print(f"  {m}: {c}   solver: {sol.R(1).coeff(m)}")
