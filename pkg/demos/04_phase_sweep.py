# %% [markdown]
# Berry curve versus the nonadiabatic curve
#
# Sweep phi from 0 to pi at fixed r, print both curves against the field solid
# angle, and write the CSV the command-line sweep also produces.

# %%
import math
import sys

import numpy as np

from helixphase import HelicalFieldParams, SweepConfig, format_sweep_csv, sweep_topological_phase

r = 0.43  # roughly v = 500 m/s with the packaged defaults
config = SweepConfig(HelicalFieldParams.from_ratio(r, 0.5), tuple(np.linspace(0, math.pi, 19)), steps_per_turn=2048)
rows = sweep_topological_phase(config)

print(" Omega_B    gamma_B     gamma_na    numeric    flags")
for row in rows:
    num = "" if row.gamma_numeric is None else f"{row.gamma_numeric:+.6f}"
    print(f"{row.solid_angle_field:8.4f} {row.gamma_berry:+10.6f} {row.gamma_nonadiabatic:+10.6f} {num:>10} "
          f"{','.join(sorted(row.flags))}")

# %% pass a path to keep the CSV
if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as fh:
        fh.write(format_sweep_csv(rows))
