"""Entanglement measures: the short-time entropy formula and realignment.

The closed-form entropy after an emission tracks the exact branch entropy
once its leading function is written as the binary entropy of (1 + u) / 2.
The realignment test flags the post-collapse mixture as entangled.
"""
# %%
import math
import warnings

import numpy as np

from driven_cavity import (
    SpaceSpec,
    SystemParams,
    approx_entropy,
    branch_state,
    realignment_trace_norm,
    schematic_post_collapse_mixture,
    state_entropy,
)
from driven_cavity.errors import ApproximationWarning

warnings.simplefilter("ignore", ApproximationWarning)

p = SystemParams.figure1()
spec = SpaceSpec(60)
ts = np.linspace(0, 3, 13)
exact = [state_entropy(branch_state("u", t, p, spec)) for t in ts]

# %%
print(" g t   exact   closed form   shifted f1")
for t, e, a, b in zip(ts, exact, approx_entropy(ts, p), approx_entropy(ts, p, corrected=False)):
    print(f"{t:4.2f}  {e:.4f}  {a:.4f}        {b:.4f}")

# %% realignment: a trace norm above 1 certifies entanglement
for phi in (0.2, 0.7956, 1.2):
    value = realignment_trace_norm(schematic_post_collapse_mixture(phi), 2, 4)
    print(f"phi = {phi}: ||R|| = {value:.12f}  (sqrt2 = {math.sqrt(2):.12f})")
