"""Quantum trajectories: ensemble averages and a single noisy record.

An ensemble of pure-state trajectories reproduces the master equation.  A
single trajectory with spontaneous emission shows the entropy dropping to
zero at each fluorescence jump and rising again between them.
"""
# %%
import numpy as np

from driven_cavity import (
    Channel,
    SpaceSpec,
    SystemParams,
    atom_field_product,
    build_operators,
    coherent_state,
    ensemble_expectation,
    entanglement_series,
    evolve_trajectory,
    integrate_master,
    run_ensemble,
)
from driven_cavity.hilbert import atom_state

spec = SpaceSpec(40)
ops = build_operators(spec)
psi0 = atom_field_product(atom_state(0, 1), coherent_state(0, spec))

# %% 100 trajectories against the master equation
p = SystemParams.figure1()
ens = run_ensemble(psi0, p, 3.0, 100, seed=1, stride=250)
exact = integrate_master(np.outer(psi0, psi0.conj()), p, 3.0, stride=250).expect(ops.number).real
stat = ensemble_expectation(ens, ops.number)
for t, m, se, x in zip(stat.times, stat.mean, stat.stderr, exact):
    print(f"g t = {t:3.1f}   <n> traj {m:6.3f} +- {se:.3f}   master {x:6.3f}")

# %% one trajectory with gamma = 0.4 g
res = evolve_trajectory(psi0, SystemParams.figure2(), 40.0, seed=7, stride=50)
series = entanglement_series(res)
spont = res.jump_times(Channel.SPONTANEOUS)
print(f"\n{len(res.jumps)} jumps, {len(spont)} spontaneous")
for t in spont[:8]:
    i = np.flatnonzero(series.times == t)[-1]
    print(f"spontaneous jump at g t = {t:6.2f}: entropy before {series['entropy'][i - 1]:.3f}, after {series['entropy'][i]:.1e}")
print(f"largest entropy along the record: {series['entropy'].max():.4f}")
