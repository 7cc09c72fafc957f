"""Closed-form factorizable states and post-emission branch states.

A factorizable state is ``e^{i Phi} (e^{-i phi}|e> + s|g>)/sqrt2 (x) |r e^{-i phi}>``
with ``s = +1`` or ``-1``.  With the atomic phase convention of
:mod:`driven_cavity.hilbert`, ``(+, r_ss, -phi_ss)`` and ``(-, r_ss, +phi_ss)``
are the upper (u) and lower (l) steady states.

After a spontaneous emission each branch is the coherent pair

    u:  ( e^{+i g r t/2} Psi_+(r, -phi)  -  e^{-i g r t/2} Psi_-(r, -phi + g t/r) ) / sqrt2
    l:  ( e^{+i g r t/2} Psi_+(r, phi - g t/r)  -  e^{-i g r t/2} Psi_-(r, phi) ) / sqrt2

in which the stationary component stays put and the other one rotates at
``g / r``.  The sign of the ``g r t / 2`` phases is the one generated by the
master equation under this phase convention; both branch vectors are
renormalized exactly on the truncated space.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import SystemParams, steady_state_values
from .errors import ApproximationWarning, ZeroAmplitudeError
from .hilbert import SpaceSpec, atom_state, build_operators, coherent_state, expectation

#: Below this value of r sin(phi) the two steady-state fields overlap noticeably.
ORTHOGONALITY_MARGIN = 3.0
#: Above this value of g t / r the short-time branch form is degrading.
SHORT_TIME_LIMIT = 0.5


@dataclass(frozen=True)
class FactorizableState:
    sign: int
    r: float
    phi: float
    global_phase: float = 0.0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.r < 0:
            raise ValueError("r must be nonnegative")

    @property
    def alpha(self) -> complex:
        return self.r * np.exp(-1j * self.phi)

    def atom(self) -> np.ndarray:
        return atom_state(np.exp(-1j * self.phi), self.sign) / np.sqrt(2)

    def ket(self, spec: SpaceSpec) -> np.ndarray:
        field = coherent_state(self.alpha, spec)
        return np.exp(1j * self.global_phase) * np.kron(self.atom(), field)


@dataclass(frozen=True)
class BranchState:
    """Coherent two-term superposition ``sum_k weight_k |term_k>``."""

    branch: str
    terms: tuple[tuple[complex, FactorizableState], ...]
    relative_phase: float = 0.0

    def ket(self, spec: SpaceSpec) -> np.ndarray:
        psi = sum(w * s.ket(spec) for w, s in self.terms)
        return psi / np.linalg.norm(psi)

    def components(self, spec: SpaceSpec) -> list[np.ndarray]:
        """Each weighted term as its own (unnormalized) vector."""
        return [w * s.ket(spec) for w, s in self.terms]


def special_state(sign: int, r0: float, phi0: float, spec: SpaceSpec) -> np.ndarray:
    """``(e^{-i phi0}|e> + sign |g>)/sqrt2 (x) |r0 e^{-i phi0}>``."""
    return FactorizableState(sign, r0, phi0).ket(spec)


def field_orthogonality(r: float, phi_a: float, phi_b: float) -> float:
    """``|<r e^{i phi_a}|r e^{i phi_b}>| = exp(-r^2 (1 - cos(phi_a - phi_b)))``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    return float(np.exp(-(r**2) * (1 - np.cos(phi_a - phi_b))))


def decoherence_factor(t, params: SystemParams):
    """Decay ``exp(-g^2 kappa t^3 / 3)`` of coherence between same-phase special states."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = np.exp(-(params.g**2) * params.kappa * t**3 / 3)
    return float(out) if out.ndim == 0 else out


def _warn_orthogonality(r: float, phi: float) -> None:
    if r * np.sin(phi) < ORTHOGONALITY_MARGIN:
        warnings.warn(
            f"r_ss sin(phi_ss) = {r * np.sin(phi):.3g} < {ORTHOGONALITY_MARGIN}; "
            "steady-state fields are only approximately orthogonal",
            ApproximationWarning,
            stacklevel=3,
        )


def conditional_steady_superposition(
    params: SystemParams, relative_phase: float = 0.0, spec: SpaceSpec | None = None
) -> np.ndarray:
    """``(Psi_u + e^{-i Phi'} Psi_l)/sqrt2`` of the two steady states, renormalized."""
    spec = spec or SpaceSpec()
    phi_ss, r_ss = steady_state_values(params)
    _warn_orthogonality(r_ss, phi_ss)
    upper = special_state(+1, r_ss, -phi_ss, spec)
    lower = special_state(-1, r_ss, phi_ss, spec)
    psi = upper + np.exp(-1j * relative_phase) * lower
    return psi / np.linalg.norm(psi)


def post_emission_collapse(psi: np.ndarray) -> np.ndarray:
    """Apply ``s_-`` and renormalize; the atom ends exactly in ``|g>``."""
    psi = np.asarray(psi, dtype=complex)
    ops = build_operators(SpaceSpec.from_dim(psi.shape[0]))
    excited = expectation(ops.excited_projector, psi).real
    if excited <= 1e-12:
        raise ZeroAmplitudeError(f"excited population {excited:.3g} too small to emit from")
    out = ops.sigma_minus @ psi
    return out / np.linalg.norm(out)


def branch_terms(
    branch: str,
    t: float,
    params: SystemParams,
    r: float | None = None,
    phi: float | None = None,
) -> BranchState:
    """Symbolic branch state at time ``t`` after an emission.

    ``r`` and ``phi`` replace the steady-state values, for emissions from a
    field with some other instantaneous amplitude and phase.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if r is None or phi is None:
        phi_ss, r_ss = steady_state_values(params)
        r = r_ss if r is None else r
        phi = phi_ss if phi is None else phi
    g = params.g
    shift = g * t / r
    if shift > SHORT_TIME_LIMIT:
        warnings.warn(
            f"g t / r = {shift:.3g} > {SHORT_TIME_LIMIT}; short-time branch form degrading",
            ApproximationWarning,
            stacklevel=3,
        )
    rabi = g * r * t / 2
    w = 1 / np.sqrt(2)
    if branch == "u":
        plus = FactorizableState(+1, r, -phi, rabi)
        minus = FactorizableState(-1, r, -phi + shift, -rabi)
    elif branch == "l":
        plus = FactorizableState(+1, r, phi - shift, rabi)
        minus = FactorizableState(-1, r, phi, -rabi)
    else:
        raise ValueError(f"branch must be 'u' or 'l', got {branch!r}")
    return BranchState(branch, ((w, plus), (-w, minus)))


def branch_state(
    branch: str,
    t: float,
    params: SystemParams,
    spec: SpaceSpec | None = None,
    r: float | None = None,
    phi: float | None = None,
) -> np.ndarray:
    """Normalized vector of the u or l branch at time ``t`` after an emission."""
    return branch_terms(branch, t, params, r, phi).ket(spec or SpaceSpec())


def branch_superposition(
    t: float,
    params: SystemParams,
    relative_phase: float = 0.0,
    spec: SpaceSpec | None = None,
    r: float | None = None,
    phi: float | None = None,
) -> np.ndarray:
    """``(Psi_u(t) + e^{-i Phi'} Psi_l(t))``, normalized."""
    spec = spec or SpaceSpec()
    psi = branch_state("u", t, params, spec, r, phi) + np.exp(-1j * relative_phase) * branch_state(
        "l", t, params, spec, r, phi
    )
    return psi / np.linalg.norm(psi)


def branch_field_overlap(t: float, params: SystemParams, r: float | None = None) -> float:
    """Overlap magnitude of the two field components of one branch at time ``t``."""
    if r is None:
        r = steady_state_values(params)[1]
    return field_orthogonality(r, 0.0, params.g * t / r)
