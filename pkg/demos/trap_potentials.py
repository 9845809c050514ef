"""Trapping potentials of the blue and green MOTs.

Integrates the two-beam scattering force across the beam overlap for
red-detuned blue (461 nm) and green (496 nm) beams, plots the potential
wells, and scans the trap depth against the magnetic-field gradient to
locate the optimum operating gradients.

    python3 demos/trap_potentials.py

Writes potential_profile.csv, potential_depth.csv and potentials.png.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from srmot.config import load_config
from srmot.sweeps import run_potential_report

HERE = pathlib.Path(__file__).parent
K_B = 1.380649e-23

# both beams two linewidths red of resonance, waists from the beam table
cfg = load_config({
    "drives": {"blue": {"saturation": 2.0, "detuning_hz": -60.0e6},
               "green": {"saturation": 6.6, "detuning_hz": -19.54e6}},
    "beams": {"blue": {"waist_m": 6.0e-3}, "green": {"waist_m": 2.3e-3}},
    "external": {"b_grad_g_per_cm": 50.0},
})
report = run_potential_report(cfg)
report["profile"].write(HERE / "potential_profile.csv")
report["depth"].write(HERE / "potential_depth.csv")

profile, depth = report["profile"], report["depth"]
z = np.array(profile.column("z_m")) * 1e3
grads = np.array(depth.column("b_grad_g_per_cm"))

fig, axes = plt.subplots(1, 2, figsize=(9.5, 4.0))
axes[0].plot(z, np.array(profile.column("v_blue_j")) / K_B * 1e3, "C0",
             label="blue MOT")
axes[0].plot(z, np.array(profile.column("v_green_j")) / K_B * 1e3, "C2",
             label="green MOT")
axes[0].set_xlabel("z (mm)")
axes[0].set_ylabel("potential (mK)")
axes[0].set_title("wells at B' = 50 G/cm", fontsize=9)
axes[0].legend(fontsize=8)

axes[1].plot(grads, np.array(depth.column("depth_blue_j")) / K_B * 1e3, "C0")
axes[1].plot(grads, np.array(depth.column("depth_green_j")) / K_B * 1e3, "C2")
axes[1].set_xlabel("B' (G/cm)")
axes[1].set_ylabel("trap depth (mK)")
axes[1].set_title("depth vs gradient", fontsize=9)
fig.tight_layout()
fig.savefig(HERE / "potentials.png", dpi=150)

best_green = grads[int(np.argmax(depth.column("depth_green_j")))]
best_blue = grads[int(np.argmax(depth.column("depth_blue_j")))]
print(f"deepest green trap near B' = {best_green:.0f} G/cm, "
      f"blue near {best_blue:.0f} G/cm")
print(f"wrote potential_profile.csv, potential_depth.csv, potentials.png in {HERE}")
