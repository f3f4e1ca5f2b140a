# %% [markdown]
# Reading the geometric phase off a trajectory
#
# Prepare the spinor along +S(0), integrate one loop, follow the phase of the
# larger amplitude, and subtract the dynamical phase -int <H0> dt.  The remainder
# should be -pi (1 - cos theta) per turn for the up substate.

# %%
import math

from helixphase import HelicalFieldParams, Substate, analytic_phases, extract_phases, wrap_to_pi

for r, deg in [(0.1, 45), (1.0, 90), (2.0, 120)]:
    p = HelicalFieldParams.from_ratio(r, math.radians(deg))
    for sub in Substate:
        num = extract_phases(p, sub, 4096)
        ref = analytic_phases(p, sub)
        print(f"r={r:<4} phi={deg:3d} {sub.name:13s} geometric {num.geometric:+.8f} "
              f"closed form {ref.geometric:+.8f}  diff mod 2pi {wrap_to_pi(num.geometric - ref.geometric):+.1e}")

# %% [markdown]
# The full phase is geometric(up) - geometric(down).  Its branch is fixed by the
# solid angle the spin-up Bloch vector sweeps, so a single point needs no sweep.

# %%
from helixphase import measure_topological_phase

p = HelicalFieldParams.from_ratio(1.0, math.pi / 2)
m = measure_topological_phase(p)
print("anchored gamma =", m.anchored, " expected", -2 * math.pi * (1 - math.sqrt(2) / 2))
