"""Master-equation dynamics of the driven, lossy atom-cavity system.

Time is measured in units of 1/g and all rates are stored as multiples of g
(``g = 1`` by default).  The model is on resonance; there are no detuning
terms.  The generator is

    d rho/dt = -i g [a^+ s_- + a s_+, rho] + E [a^+ - a, rho]
               + kappa (2 a rho a^+ - a^+ a rho - rho a^+ a)
               + gamma/2 (2 s_- rho s_+ - s_+ s_- rho - rho s_+ s_-)

i.e. Hamiltonian ``H = g (a^+ s_- + a s_+) + i E (a^+ - a)`` with collapse
operators ``sqrt(2 kappa) a`` and ``sqrt(gamma) s_-``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DimensionError, StepSizeError, TruncationError, WeakDrivingError
from .hilbert import SpaceSpec, build_operators

log = logging.getLogger(__name__)

#: Largest allowed value of ``dt`` times the generator's operator-norm scale.
STEP_GUARD = 0.1
#: Largest allowed population in the top Fock level during an integration.
TOP_LEVEL_TOLERANCE = 1e-6
#: Trace drift above which the integrator renormalizes (and logs).
TRACE_DRIFT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SystemParams:
    """Physical rates in units where ``g = 1`` unless stated otherwise."""

    drive: float
    kappa: float
    gamma: float = 0.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("drive", "kappa", "gamma", "g"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite nonnegative rate, got {value!r}")

    @classmethod
    def figure1(cls) -> SystemParams:
        """E = 0.7 g, kappa = 0.125 g, no spontaneous emission."""
        return cls(drive=0.7, kappa=0.125, gamma=0.0)

    @classmethod
    def figure2(cls) -> SystemParams:
        """The same rates with spontaneous emission gamma = 0.4 g."""
        return cls(drive=0.7, kappa=0.125, gamma=0.4)

    def replace(self, **changes) -> SystemParams:
        values = {k: getattr(self, k) for k in ("drive", "kappa", "gamma", "g")}
        values.update(changes)
        return SystemParams(**values)


@dataclass(frozen=True)
class Generator:
    """Precomputed matrices of the master equation for one cutoff."""

    hamiltonian: np.ndarray
    h_eff: np.ndarray
    a: np.ndarray
    sigma_minus: np.ndarray
    kappa: float
    gamma: float

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = -1j * (self.h_eff @ rho - rho @ self.h_eff.conj().T)
        if self.kappa:
            out += 2 * self.kappa * (self.a @ rho @ self.a.conj().T)
        if self.gamma:
            out += self.gamma * (self.sigma_minus @ rho @ self.sigma_minus.conj().T)
        return out


def hamiltonian(params: SystemParams, spec: SpaceSpec) -> np.ndarray:
    ops = build_operators(spec)
    return params.g * (ops.a_dagger @ ops.sigma_minus + ops.a @ ops.sigma_plus) + 1j * params.drive * (
        ops.a_dagger - ops.a
    )


def effective_hamiltonian(params: SystemParams, spec: SpaceSpec) -> np.ndarray:
    """Non-Hermitian no-jump generator ``H - i kappa a^+a - i gamma/2 s_+ s_-``."""
    ops = build_operators(spec)
    return (
        hamiltonian(params, spec)
        - 1j * params.kappa * ops.number
        - 0.5j * params.gamma * ops.excited_projector
    )


@lru_cache(maxsize=32)
def generator(params: SystemParams, n_max: int) -> Generator:
    spec = SpaceSpec(n_max)
    ops = build_operators(spec)
    return Generator(
        hamiltonian=hamiltonian(params, spec),
        h_eff=effective_hamiltonian(params, spec),
        a=ops.a,
        sigma_minus=ops.sigma_minus,
        kappa=params.kappa,
        gamma=params.gamma,
    )


def _spec_of(rho: np.ndarray) -> SpaceSpec:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got {rho.shape}")
    return SpaceSpec.from_dim(rho.shape[0])


def liouvillian_apply(rho: np.ndarray, params: SystemParams) -> np.ndarray:
    """Right-hand side ``d rho/dt`` of the master equation."""
    rho = np.asarray(rho, dtype=complex)
    return generator(params, _spec_of(rho).n_max).apply(rho)


def rk4_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of the autonomous ODE y' = f(y)."""
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def rate_scale(params: SystemParams, spec: SpaceSpec) -> float:
    """Operator-norm scale of the generator on the truncated space.

    Bounds the largest eigenfrequency contributed by each term: the coupling
    and the drive grow like ``sqrt(n_max)``, cavity damping like ``n_max``.
    """
    root_n = np.sqrt(spec.n_max)
    return max(
        params.g * root_n,
        2 * params.drive * root_n,
        2 * params.kappa * spec.n_max,
        params.gamma,
    )


def check_step(params: SystemParams, spec: SpaceSpec, dt: float) -> None:
    if dt <= 0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    scale = dt * rate_scale(params, spec)
    if scale >= STEP_GUARD:
        raise StepSizeError(
            f"dt={dt} too large: dt * rate scale = {scale:.3g} >= {STEP_GUARD} at n_max={spec.n_max}"
        )


def n_steps_for(t_final: float, dt: float) -> int:
    n = int(round(t_final / dt))
    if n < 0 or abs(n * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise StepSizeError(f"t_final={t_final} is not a whole number of steps dt={dt}")
    return n


def top_level_population(rho: np.ndarray) -> float:
    nf = rho.shape[0] // 2
    return float(rho[nf - 1, nf - 1].real + rho[-1, -1].real)


@dataclass
class MasterRun:
    """Sampled density operators of one master-equation integration."""

    times: np.ndarray
    states: np.ndarray
    params: SystemParams
    dt: float
    max_trace_drift: float = 0.0
    renormalizations: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def expect(self, op: np.ndarray) -> np.ndarray:
        """Expectation value of ``op`` at every sample."""
        return np.einsum("ij,tji->t", op, self.states)


def integrate_master(
    rho0: np.ndarray,
    params: SystemParams,
    t_final: float,
    dt: float = 0.002,
    stride: int = 1,
    observe: Callable[[np.ndarray], np.ndarray] | None = None,
) -> MasterRun:
    """Fixed-step RK4 integration of the master equation.

    Samples every ``stride`` steps (and always at ``t = 0`` and ``t_final``).
    With ``observe`` given, only ``observe(rho)`` is kept at each sample and
    ``states`` holds those values instead of full matrices.
    The trace is renormalized only when it drifts by more than
    ``TRACE_DRIFT_TOLERANCE``; every renormalization is logged.
    """
    keep = observe or (lambda m: m.copy())
    rho = np.array(rho0, dtype=complex)
    spec = _spec_of(rho)
    check_step(params, spec, dt)
    n_steps = n_steps_for(t_final, dt)
    gen = generator(params, spec.n_max)

    times = [0.0]
    states = [keep(rho)]
    drift_max = abs(np.trace(rho).real - 1.0)
    renorms = 0
    for k in range(1, n_steps + 1):
        rho = rk4_step(gen.apply, rho, dt)
        tr = np.trace(rho).real
        drift = abs(tr - 1.0)
        drift_max = max(drift_max, drift)
        if drift > TRACE_DRIFT_TOLERANCE:
            log.warning("trace drift %.3g at t=%.6g; renormalizing", drift, k * dt)
            rho /= tr
            renorms += 1
        top = top_level_population(rho)
        if top > TOP_LEVEL_TOLERANCE:
            raise TruncationError(
                f"top Fock level population {top:.3g} at t={k * dt:.6g} exceeds {TOP_LEVEL_TOLERANCE}"
            )
        if k % stride == 0 or k == n_steps:
            times.append(k * dt)
            states.append(keep(rho))
    return MasterRun(
        times=np.array(times),
        states=np.array(states),
        params=params,
        dt=dt,
        max_trace_drift=drift_max,
        renormalizations=renorms,
    )


# --- semiclassical (factorized, gamma = 0) description --------------------


@dataclass(frozen=True)
class SemiclassicalPoint:
    """Mean field ``alpha = r e^{-i phi}`` plus the atomic Bloch vector.

    ``bloch = (2 Re <s_->, 2 Im <s_->, <s_z>)``.
    """

    r: float
    phi: float
    bloch: tuple[float, float, float]

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if np.linalg.norm(self.bloch) > 1 + 1e-9:
            raise ValueError(f"Bloch vector {self.bloch} is longer than 1")

    @property
    def alpha(self) -> complex:
        return self.r * np.exp(-1j * self.phi)

    @property
    def dipole(self) -> complex:
        """``<s_->``."""
        return 0.5 * (self.bloch[0] + 1j * self.bloch[1])

    @classmethod
    def from_mean_field(cls, alpha: complex, dipole: complex, inversion: float) -> SemiclassicalPoint:
        return cls(
            r=float(abs(alpha)),
            phi=float(-np.angle(alpha)),
            bloch=(2 * dipole.real, 2 * dipole.imag, float(inversion)),
        )

    @classmethod
    def factorizable(cls, sign: int, r: float, phi: float) -> SemiclassicalPoint:
        """Mean-field values of the state ``(e^{-i phi}|e> + sign |g>)|r e^{-i phi}>/sqrt2``."""
        dipole = -sign * 0.5 * np.exp(-1j * phi)
        return cls(r=float(r), phi=float(phi), bloch=(2 * dipole.real, 2 * dipole.imag, 0.0))


def steady_state_values(params: SystemParams) -> tuple[float, float]:
    """``(phi_ss, r_ss) = (arcsin(g / 2E), (E / kappa) cos phi_ss)``."""
    if params.g <= 0:
        raise WeakDrivingError("the steady states need g > 0")
    if params.drive <= params.g / 2:
        raise WeakDrivingError(f"strong driving needs E > g/2; got E={params.drive}, g={params.g}")
    if params.kappa <= 0:
        raise ValueError("the steady states need kappa > 0")
    phi_ss = float(np.arcsin(params.g / (2 * params.drive)))
    r_ss = float(params.drive / params.kappa * np.cos(phi_ss))
    return phi_ss, r_ss


def semiclassical_steady_state(params: SystemParams) -> tuple[SemiclassicalPoint, SemiclassicalPoint]:
    """Upper and lower fixed points, with phases ``-phi_ss`` and ``+phi_ss``."""
    phi_ss, r_ss = steady_state_values(params)
    upper = SemiclassicalPoint.factorizable(+1, r_ss, -phi_ss)
    lower = SemiclassicalPoint.factorizable(-1, r_ss, phi_ss)
    return upper, lower


def mean_field_rhs(alpha: complex, dipole: complex, inversion: float, params: SystemParams):
    """Factorized Heisenberg equations for ``(<a>, <s_->, <s_z>)`` at gamma = 0."""
    g = params.g
    d_alpha = params.drive - params.kappa * alpha - 1j * g * dipole
    d_dipole = 1j * g * alpha * inversion
    d_inversion = -4 * g * (np.conj(alpha) * dipole).imag
    return d_alpha, d_dipole, d_inversion


def semiclassical_rhs(point: SemiclassicalPoint, params: SystemParams) -> np.ndarray:
    """Time derivatives ``(dr, dphi, dbloch_x, dbloch_y, dbloch_z)``."""
    d_alpha, d_dipole, d_inv = mean_field_rhs(point.alpha, point.dipole, point.bloch[2], params)
    rot = d_alpha * np.exp(1j * point.phi)
    dr = rot.real
    dphi = -rot.imag / point.r if point.r > 0 else 0.0
    return np.array([dr, dphi, 2 * d_dipole.real, 2 * d_dipole.imag, d_inv])


def evolve_semiclassical(
    point: SemiclassicalPoint, params: SystemParams, t_final: float, dt: float = 0.002
) -> list[SemiclassicalPoint]:
    """RK4 integration of the mean-field equations; returns every step."""
    y = np.array([point.alpha, point.dipole, point.bloch[2]], dtype=complex)

    def f(v):
        return np.array(mean_field_rhs(v[0], v[1], v[2].real, params), dtype=complex)

    out = [point]
    for _ in range(n_steps_for(t_final, dt)):
        y = rk4_step(f, y, dt)
        out.append(SemiclassicalPoint.from_mean_field(y[0], y[1], y[2].real))
    return out


def steady_state_mixture(params: SystemParams, spec: SpaceSpec | None = None) -> np.ndarray:
    """Equal incoherent mixture of the upper and lower special states."""
    from .branches import special_state

    spec = spec or SpaceSpec()
    phi_ss, r_ss = steady_state_values(params)
    upper = special_state(+1, r_ss, -phi_ss, spec)
    lower = special_state(-1, r_ss, phi_ss, spec)
    return 0.5 * np.outer(upper, upper.conj()) + 0.5 * np.outer(lower, lower.conj())
