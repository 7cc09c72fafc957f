"""Monte-Carlo wavefunction unraveling with cavity and spontaneous-emission jumps.

Each step of length ``dt`` first draws ``r1 ~ U[0, 1)``.  If
``r1 < dp = dt (2 kappa <a^+a> + gamma <s_+ s_->)`` a jump happens: a second
draw picks the channel in proportion to its weight and the state becomes
``a|psi>`` or ``s_-|psi>``, renormalized.  Otherwise the state is advanced by
one RK4 step of ``-i H_eff`` and renormalized.

Random numbers come from numpy's counter-based ``Philox`` bit generator keyed
with ``seed ^ index`` for trajectory ``index``.  Every step consumes exactly
one draw, plus one more on a jump, so a trajectory depends only on its own
(psi0, params, dt, seed, index).
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import SystemParams, check_step, generator, n_steps_for, rk4_step
from .entanglement import state_entropy
from .errors import StepSizeError
from .hilbert import SpaceSpec, build_operators
from .series import TimeSeries

JUMP_PROBABILITY_GUARD = 0.1


class Channel(str, enum.Enum):
    CAVITY = "cavity_emission"
    SPONTANEOUS = "spontaneous_emission"


@dataclass(frozen=True)
class JumpRecord:
    time: float
    channel: Channel


@dataclass
class TrajectoryResult:
    """Sampled states of one trajectory plus its jump record.

    ``jump_states[k]`` is the renormalized state right after ``jumps[k]``.
    """

    times: np.ndarray
    states: np.ndarray
    jumps: list[JumpRecord]
    jump_states: list[np.ndarray]
    seed: int
    index: int = 0
    params: SystemParams | None = None
    dt: float = 0.0

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.times, self.states))

    def jump_times(self, channel: Channel | None = None) -> np.ndarray:
        return np.array([j.time for j in self.jumps if channel is None or j.channel == channel])


def trajectory_rng(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) ^ int(index)) & (2**64 - 1)))


def evolve_trajectory(
    psi0: np.ndarray,
    params: SystemParams,
    t_final: float,
    dt: float = 0.002,
    seed: int = 0,
    index: int = 0,
    stride: int = 1,
) -> TrajectoryResult:
    """Run one quantum trajectory, sampling every ``stride`` steps."""
    psi = np.array(psi0, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("psi0 must be normalized")
    spec = SpaceSpec.from_dim(psi.shape[0])
    check_step(params, spec, dt)
    n_steps = n_steps_for(t_final, dt)
    gen = generator(params, spec.n_max)
    ops = build_operators(spec)
    minus_i_heff = -1j * gen.h_eff
    a, sm = ops.a, ops.sigma_minus
    nf = spec.field_dim
    photon_numbers = np.tile(np.arange(nf, dtype=float), 2)
    two_kappa, gamma = 2 * params.kappa, params.gamma
    rng = trajectory_rng(seed, index)

    def drift(v):
        return minus_i_heff @ v

    times = [0.0]
    states = [psi.copy()]
    jumps: list[JumpRecord] = []
    jump_states: list[np.ndarray] = []
    for k in range(1, n_steps + 1):
        prob = np.abs(psi) ** 2
        w_cav = two_kappa * float(prob @ photon_numbers)
        w_spont = gamma * float(prob[:nf].sum())
        dp = dt * (w_cav + w_spont)
        if dp > JUMP_PROBABILITY_GUARD:
            raise StepSizeError(f"jump probability {dp:.3g} per step exceeds {JUMP_PROBABILITY_GUARD}")
        if rng.random() < dp:
            if rng.random() * (w_cav + w_spont) < w_cav:
                channel, psi = Channel.CAVITY, a @ psi
            else:
                channel, psi = Channel.SPONTANEOUS, sm @ psi
            psi /= np.linalg.norm(psi)
            jumps.append(JumpRecord(k * dt, channel))
            jump_states.append(psi.copy())
        else:
            psi = rk4_step(drift, psi, dt)
            psi /= np.linalg.norm(psi)
        if k % stride == 0 or k == n_steps:
            times.append(k * dt)
            states.append(psi.copy())
    return TrajectoryResult(
        times=np.array(times),
        states=np.array(states),
        jumps=jumps,
        jump_states=jump_states,
        seed=seed,
        index=index,
        params=params,
        dt=dt,
    )


def _run_one(job):
    psi0, params, t_final, dt, seed, index, stride = job
    return evolve_trajectory(psi0, params, t_final, dt, seed, index, stride)


def run_ensemble(
    psi0: np.ndarray,
    params: SystemParams,
    t_final: float,
    n_traj: int,
    dt: float = 0.002,
    seed: int = 0,
    stride: int = 1,
    workers: int | None = 1,
) -> list[TrajectoryResult]:
    """Trajectories ``0 .. n_traj-1``, in index order whatever the worker count."""
    jobs = [(psi0, params, t_final, dt, seed, i, stride) for i in range(n_traj)]
    if workers == 1 or n_traj == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, n_traj // (4 * (workers or 4)))))


def pairwise_mean(stack: np.ndarray) -> np.ndarray:
    """Mean over axis 0 by pairwise summation in a fixed tree order."""
    items = list(stack)
    if not items:
        raise ValueError("empty ensemble")
    n = len(items)
    while len(items) > 1:
        nxt = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0] / n


def _check_grid(results: list[TrajectoryResult]) -> np.ndarray:
    if not results:
        raise ValueError("empty ensemble")
    grid = results[0].times
    for res in results[1:]:
        if res.times.shape != grid.shape or not np.array_equal(res.times, grid):
            raise ValueError("trajectories do not share a time grid")
    return grid


def ensemble_density(results: list[TrajectoryResult]) -> tuple[np.ndarray, np.ndarray]:
    """``(times, rho(t))`` with ``rho(t)`` the mean projector over trajectories."""
    grid = _check_grid(results)
    stack = np.array([np.einsum("ti,tj->tij", r.states, r.states.conj()) for r in results])
    return grid, pairwise_mean(stack)


@dataclass
class EnsembleStatistic:
    times: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n: int = field(default=0)


def ensemble_expectation(results: list[TrajectoryResult], op: np.ndarray) -> EnsembleStatistic:
    """Mean and standard error of a Hermitian observable across trajectories."""
    grid = _check_grid(results)
    per_traj = np.array([np.einsum("ti,ij,tj->t", r.states.conj(), op, r.states).real for r in results])
    n = len(results)
    mean = pairwise_mean(per_traj)
    stderr = per_traj.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.full_like(mean, np.nan)
    return EnsembleStatistic(grid, mean, stderr, n)


def entanglement_series(result: TrajectoryResult, include_jumps: bool = True) -> TimeSeries:
    """Entropy of entanglement along a trajectory.

    With ``include_jumps`` the post-jump states are merged into the series at
    their jump times, so every spontaneous-emission reset shows up as a zero.
    """
    times = list(result.times)
    values = [state_entropy(s) for s in result.states]
    if include_jumps and result.jumps:
        times += [j.time for j in result.jumps]
        values += [state_entropy(s) for s in result.jump_states]
        # stable sort keeps the post-jump value after a coincident grid sample
        order = np.argsort(np.array(times), kind="stable")
        times = np.array(times)[order]
        values = np.array(values)[order]
    return TimeSeries(
        np.asarray(times, dtype=float),
        {"entropy": np.asarray(values, dtype=float)},
        meta={"seed": result.seed, "index": result.index, "n_jumps": len(result.jumps)},
    )
