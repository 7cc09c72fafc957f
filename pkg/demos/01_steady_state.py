"""Semiclassical steady state and the entangled superposition it implies.

Strong driving (E > g/2) gives two factorizable fixed points that differ in
the sign of the field phase.  The quantum steady state looks like an equal
mixture of the two; conditioning on the emitted light picks a superposition
whose atom is partially entangled with the field.
"""
# %%
import math
import warnings

import numpy as np

from driven_cavity import (
    SystemParams,
    conditional_steady_superposition,
    entropy_of_entanglement,
    partial_trace_field,
    semiclassical_steady_state,
    steady_state_values,
)
from driven_cavity.errors import ApproximationWarning

warnings.simplefilter("ignore", ApproximationWarning)

p = SystemParams.figure1()  # E = 0.7 g, kappa = 0.125 g, gamma = 0
phi_ss, r_ss = steady_state_values(p)
print(f"phi_ss = {phi_ss:.4f} rad, r_ss = {r_ss:.3f}")

# %% the two fixed points
for point in semiclassical_steady_state(p):
    print(f"alpha = {point.alpha:.3f}   <s_-> = {point.dipole:.3f}   <s_z> = {point.bloch[2]:+.2f}")

# %% conditional superposition: atom eigenvalues are (1 +- sin phi_ss) / 2
for rel in (0.0, 1.0, 2.5):
    rho_a = partial_trace_field(conditional_steady_superposition(p, rel))
    print(f"Phi' = {rel:.1f}: eigenvalues {np.round(np.linalg.eigvalsh(rho_a), 6)}  E = {entropy_of_entanglement(rho_a):.4f}")
print("expected", round((1 - math.sin(phi_ss)) / 2, 6), round((1 + math.sin(phi_ss)) / 2, 6))
