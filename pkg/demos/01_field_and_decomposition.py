# %% [markdown]
# Helical field and its rotating-frame form
#
# The field seen by the neutron turns about z at angular rate omega = 2 pi v / L.
# It can be rewritten as B * S(t) minus a transitionless term built from S(t).
# Here we check the rewrite numerically and look at how far the spin cone
# angle theta strays from the field cone angle phi.

# %%
import math

import numpy as np

from helixphase import HelicalFieldParams, helical_field, reconstruct_field, rotating_frame_params

params = HelicalFieldParams.from_ratio(0.5, math.radians(60))
frame = rotating_frame_params(params)
print(f"r = {params.c / params.B0:.3f}  B = {frame.B:.6f}  theta = {math.degrees(frame.theta):.3f} deg")

# %%
t = np.linspace(0, params.T, 9)
gap = np.abs(reconstruct_field(frame, params.kappa, params.omega, t) - helical_field(params, t)).max()
print("max |B*S - S x dS/kappa - B0(t)| =", gap)

# %% theta versus phi as the helix gets faster
for r in (1e-3, 0.1, 0.5, 1.0, 2.0):
    th = [rotating_frame_params(HelicalFieldParams.from_ratio(r, math.radians(d))).theta for d in (30, 90, 150)]
    print(f"r = {r:<6}", "  ".join(f"{math.degrees(x):7.2f}" for x in th))
