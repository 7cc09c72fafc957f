"""Intensity-field correlation h(tau) after a fluorescence detection.

Adding the components of each branch coherently gives Rabi oscillations at
angular frequency 2 g r_ss on top of a slow rise; dropping the cross terms
leaves only the rise.  The exact conditioned master equation is shown for
comparison.
"""
# %%
import math
import warnings

import numpy as np
from scipy.signal import find_peaks

from driven_cavity import (
    SystemParams,
    conditional_steady_superposition,
    hft_approx,
    hft_from_branches,
    hft_numeric,
    steady_state_values,
)
from driven_cavity.errors import ApproximationWarning

warnings.simplefilter("ignore", ApproximationWarning)

p = SystemParams.figure1()
phi_ss, r_ss = steady_state_values(p)
ts = np.round(np.arange(0, 201) * 0.01, 10)

coh = hft_from_branches(ts, p).values
inc = hft_from_branches(ts, p, coherent=False).values
approx = hft_approx(ts, p).values
exact = hft_numeric(conditional_steady_superposition(p, 0.0), p, taus=ts).values

# %%
print(" g t   coherent  incoherent  closed form  master")
for i in range(0, len(ts), 20):
    print(f"{ts[i]:4.1f}  {coh[i]:.4f}    {inc[i]:.4f}      {approx[i]:.4f}       {exact[i]:.4f}")

# %% the Rabi period, read off the branch curves over a longer window
long = np.arange(0, 601) * 0.005
osc = hft_from_branches(long, p).values - hft_from_branches(long, p, coherent=False).values
peaks, _ = find_peaks(osc)
print(f"\npeaks at {np.round(long[peaks], 3)}")
print(f"spacing {np.diff(long[peaks]).mean():.3f}, expected pi / r_ss = {math.pi / r_ss:.3f}")
