"""Separation of timescales in the two-color MOT.

Starts 1e6 atoms in the ground state and propagates the full 12x12
system from nanoseconds to seconds: damped Rabi oscillations of the blue
pair appear on the 10 ns scale, optical pumping into the green-red
subsystem takes milliseconds, and loading/loss balance settles last.
The hybrid two-pool model (starting at blue-pair equilibrium) is overlaid
to show both routes reach the same equilibrium.

    python3 demos/time_evolution.py

Writes evolution.csv and evolution.png next to this script.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from srmot.config import load_config
from srmot.sweeps import run_time_evolution

HERE = pathlib.Path(__file__).parent

cfg = load_config({"times": {"start_s": 1e-9, "stop_s": 10.0, "count": 401,
                             "scale": "log"}})
table = run_time_evolution(cfg)
table.write(HERE / "evolution.csv")

t = np.array(table.column("time_s"))
fig, ax = plt.subplots(figsize=(7.0, 4.4))
ax.loglog(t, table.column("full_n22_atoms"), "C0", lw=1.0, label="N22 (full)")
ax.loglog(t, table.column("full_n_blue_atoms"), "C9", lw=1.4, label="N_blue (full)")
ax.loglog(t, np.maximum(table.column("full_n_grrd_atoms"), 1e-3), "C2", lw=1.4,
          label="N_gr:rd (full)")
ax.loglog(t, table.column("full_n_total_atoms"), "k", lw=1.0, label="N total")
ax.loglog(t, table.column("hybrid_n_blue_atoms"), "c--", lw=1.0,
          label="N_blue (hybrid)")
ax.loglog(t, np.maximum(table.column("hybrid_n_grrd_atoms"), 1e-3), "c:",
          lw=1.0, label="N_gr:rd (hybrid)")
ax.set_xlabel("time (s)")
ax.set_ylabel("atoms")
ax.set_ylim(1e0, 3e6)
ax.legend(fontsize=8, ncol=2)
ax.set_title("Rabi flopping, inter-subsystem pumping, load/loss balance")
fig.tight_layout()
fig.savefig(HERE / "evolution.png", dpi=150)

ng = np.array(table.column("full_n_grrd_atoms"))
crest = ng.max()
print(f"green-red pool half-rise at t = {t[np.argmax(ng >= 0.5*crest)]:.3g} s")
print(f"wrote {HERE/'evolution.csv'}, {HERE/'evolution.png'}")
