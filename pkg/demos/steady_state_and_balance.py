"""Steady states and atom-number balancing with the 688 nm pump.

Walks through the core workflow: build the 12x12 generator at the
reference operating point, solve for the stationary populations, compare
with the hybrid two-pool reduction, then sweep the 688 nm saturation and
detuning to map out how the pump shifts atoms between the blue and
green-red subsystems.

Run from the repository root:

    python3 demos/steady_state_and_balance.py

Writes balance_s56.csv, balance_delta56.csv and balance_curves.png next
to this script.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from srmot import build_liouvillian, hybrid_steady_state, steady_state
from srmot.config import load_config
from srmot.sweeps import run_balance_sweep

HERE = pathlib.Path(__file__).parent

# --- single steady state ----------------------------------------------------
cfg = load_config()  # reference point: s12=1.3, s34=2.1, s56=25, loaded MOT
full = steady_state(build_liouvillian(cfg.params))
hyb = hybrid_steady_state(cfg.params)

print("steady state at the reference operating point")
print(f"  {'':10s} {'full':>12s} {'hybrid':>12s}")
for label in ("n11", "n22", "n33", "n44", "n55", "n66"):
    print(f"  {label:10s} {full[label].real:12.1f} {hyb.state[label].real:12.1f}")
print(f"  {'N_blue':10s} {full.n_blue:12.1f} {hyb.pops.n_blue:12.1f}")
print(f"  {'N_gr:rd':10s} {full.n_grrd:12.1f} {hyb.pops.n_grrd:12.1f}")

# --- balance curves ----------------------------------------------------------
cfg_s = load_config({"sweep": {"variable": "s56", "start": 0.0, "stop": 31.0,
                               "count": 101, "scale": "linear"}})
table_s = run_balance_sweep(cfg_s)
table_s.write(HERE / "balance_s56.csv")

cfg_d = load_config({"sweep": {"variable": "delta56", "start": -12e6,
                               "stop": 12e6, "count": 101, "scale": "linear"}})
table_d = run_balance_sweep(cfg_d)
table_d.write(HERE / "balance_delta56.csv")

fig, axes = plt.subplots(1, 2, figsize=(9.5, 4.0), sharey=True)
s56 = table_s.column("s56_dimensionless")
axes[0].plot(s56, table_s.column("full_n_blue_atoms"), "C0-", label="N_blue (full)")
axes[0].plot(s56, table_s.column("full_n_grrd_atoms"), "C2-", label="N_gr:rd (full)")
axes[0].plot(s56, table_s.column("hybrid_n_blue_atoms"), "C0--", label="N_blue (hybrid)")
axes[0].plot(s56, table_s.column("hybrid_n_grrd_atoms"), "C2--", label="N_gr:rd (hybrid)")
axes[0].set_xlabel("s56")
axes[0].set_ylabel("atoms")
axes[0].legend(fontsize=8)

d56 = np.array(table_d.column("delta56_hz")) / 1e6
axes[1].plot(d56, table_d.column("full_n_blue_atoms"), "C0-")
axes[1].plot(d56, table_d.column("full_n_grrd_atoms"), "C2-")
axes[1].plot(d56, table_d.column("hybrid_n_blue_atoms"), "C0--")
axes[1].plot(d56, table_d.column("hybrid_n_grrd_atoms"), "C2--")
axes[1].set_xlabel("688 nm detuning (MHz)")

fig.suptitle("Atom-number balancing via the 688 nm pump")
fig.tight_layout()
fig.savefig(HERE / "balance_curves.png", dpi=150)
print(f"\nwrote {HERE/'balance_s56.csv'}, {HERE/'balance_delta56.csv'}, "
      f"{HERE/'balance_curves.png'}")
