"""Master-equation evolution from the empty cavity with the atom in |g>.

The field builds up towards |alpha| ~ r_ss while the atom saturates near
half excitation; the atom-field entropy climbs as the two semiclassical
branches separate.
"""
# %%
import numpy as np

from driven_cavity import (
    SpaceSpec,
    SystemParams,
    atom_field_product,
    build_operators,
    coherent_state,
    entropy_of_entanglement,
    integrate_master,
    partial_trace_field,
)
from driven_cavity.hilbert import atom_state

p = SystemParams.figure1()
spec = SpaceSpec(60)
ops = build_operators(spec)
psi0 = atom_field_product(atom_state(0, 1), coherent_state(0, spec))

run = integrate_master(np.outer(psi0, psi0.conj()), p, 10.0, dt=0.002, stride=500)

# %%
print(" g t   <s+s->   <n>     <a>             E")
for t, rho in zip(run.times, run.states):
    pe = np.trace(ops.excited_projector @ rho).real
    n = np.trace(ops.number @ rho).real
    a = np.trace(ops.a @ rho)
    e = entropy_of_entanglement(partial_trace_field(rho))
    print(f"{t:4.1f}  {pe:.4f}  {n:7.3f}  {a:.3f}  {e:.3f}")
