"""What happens after a fluorescence photon is detected.

The emission collapses the atom to |g>, which is a superposition of the two
special states; each branch then splits into two field components rotating
in opposite directions.  Entanglement rises as they separate and the Rabi
oscillations collapse.
"""
# %%
import warnings

import numpy as np

from driven_cavity import (
    SpaceSpec,
    SystemParams,
    branch_state,
    branch_superposition,
    conditional_steady_superposition,
    decoherence_factor,
    entropy_of_entanglement,
    integrate_master,
    partial_trace_field,
    post_emission_collapse,
    state_entropy,
    steady_state_values,
)
from driven_cavity.errors import ApproximationWarning

warnings.simplefilter("ignore", ApproximationWarning)

p = SystemParams.figure1()
spec = SpaceSpec(60)
phi_ss, r_ss = steady_state_values(p)

collapsed = post_emission_collapse(conditional_steady_superposition(p, 0.0, spec))
run = integrate_master(np.outer(collapsed, collapsed.conj()), p, 2.0, stride=100)

# %% closed-form branches against the master equation
print(" g t   branches   master    single u branch")
for t, rho in zip(run.times, run.states):
    b = state_entropy(branch_superposition(t, p, 2 * phi_ss, spec))
    m = entropy_of_entanglement(partial_trace_field(rho))
    u = state_entropy(branch_state("u", t, p, spec))
    print(f"{t:4.1f}   {b:.4f}     {m:.4f}    {u:.4f}")

# %% cavity loss slowly decoheres the cat components
for t in (0.5, 1.0, 2.0, 4.0):
    print(f"g t = {t}: surviving coherence {decoherence_factor(t, p):.4f}")
