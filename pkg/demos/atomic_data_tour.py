"""Tour of the bundled 88Sr data and the rate arithmetic behind it.

Shows how the slow inter-subsystem decay rates arise from multi-step
cascades (a chain is rate-limited like series resistors, branches add),
and how laser powers and waists translate into saturation parameters.

    python3 demos/atomic_data_tour.py
"""

import math

from srmot import (beam_intensity, combined_rates, load_constants,
                   parallel_combine, saturation_intensity,
                   saturation_parameter)

TWO_PI = 2.0 * math.pi
sr = load_constants()

print("effective transition rates (ordinary frequencies)")
for name in ("gamma_12", "gamma_34", "gamma_56", "gamma_36",
             "gamma_15", "gamma_45", "gamma_25", "gamma_23"):
    value = getattr(sr, name) / TWO_PI
    unit = "MHz" if value > 1e6 else ("kHz" if value > 1e3 else "Hz")
    scale = {"MHz": 1e6, "kHz": 1e3, "Hz": 1.0}[unit]
    print(f"  {name}: {value/scale:8.3f} {unit}")

print("\ncascade arithmetic (chains rate-limit, branches add):")
c = sr.cascade
two_step = parallel_combine([c["1P1__1D2"], c["1D2__3P1"]])
print(f"  1P1 -> 1D2 -> 3P1: "
      f"{c['1P1__1D2']/TWO_PI:.0f} Hz chained with {c['1D2__3P1']/TWO_PI:.1f} Hz"
      f" -> {two_step/TWO_PI:.1f} Hz")
combined = combined_rates(c)
for key, value in combined.items():
    print(f"  {key} from cascade: {value/TWO_PI:10.1f} Hz "
          f"(stored {getattr(sr, key)/TWO_PI:10.1f} Hz)")

print("\nsaturation bookkeeping for the beam table:")
rows = [("461 nm", 40e-3, 2.9e-3, sr.gamma_12, sr.lambda_12),
        ("496 nm", 2.8e-3, 2.2e-3, sr.gamma_34, sr.lambda_34),
        ("688 nm", 2.6e-3, 1.8e-3, sr.gamma_56, sr.lambda_56)]
for label, power, waist, gamma, lam in rows:
    intensity = beam_intensity(power, waist)
    i_sat = saturation_intensity(gamma, lam)
    s = saturation_parameter(power, waist, gamma, lam)
    print(f"  {label}: P = {power*1e3:5.1f} mW, w = {waist*1e3:.1f} mm"
          f" -> I = {intensity/10:7.1f} mW/cm^2, I_sat = {i_sat/10:6.2f}"
          f" mW/cm^2, s = {s:5.2f}")
