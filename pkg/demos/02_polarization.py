# %% [markdown]
# Polarization after the helix
#
# Start spin up along z, integrate across one turn, read P_z.  The closed form
# uses (B, theta); the adiabatic guess uses (B0, phi).  They part ways as r grows.

# %%
import math

import numpy as np

from helixphase import SPIN_UP, HelicalFieldParams, evolve, polarization_adiabatic, polarization_exact

phi = math.radians(70)
print(" r       exact        integrated   adiabatic    richardson")
for r in (0.01, 0.1, 0.5, 1.0, 2.0):
    p = HelicalFieldParams.from_ratio(r, phi)
    res = evolve(p, SPIN_UP, 4096)
    print(f"{r:<6} {polarization_exact(p):+.9f} {res.polarization_z:+.9f} "
          f"{polarization_adiabatic(p):+.9f} {res.richardson_error:.1e}")

# %% the B0 scan oscillates inside the envelope 1 - 2 sin^2(theta)
B0 = np.linspace(0.9, 1.1, 9)
base = HelicalFieldParams.from_ratio(0.05, phi)
for b in B0:
    p = HelicalFieldParams(b, phi, base.L, base.v, base.kappa)
    print(f"B0 = {b:.3f}  P_z = {polarization_exact(p):+.6f}")
