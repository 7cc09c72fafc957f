"""Truncated atom (x) field Hilbert space, operators and basic state algebra.

Basis ordering is atom-major: composite index ``atom * (n_max + 1) + n`` with
atom index 0 = excited ``|e>`` and 1 = ground ``|g>``, and ``n`` the photon
number.  Every other module relies on this layout.

Atomic phase convention
-----------------------
The lowering operator is represented as ``sigma_minus = -|g><e|``.  This is a
choice of relative phase between ``|e>`` and ``|g>`` (equivalently, the sign
of the coupling g).  With it, the states ``(e^{-i phi}|e> +/- |g>) |r e^{-i phi}>``
with ``(+, -phi_ss)`` and ``(-, +phi_ss)`` are the stationary points of the
driven master equation, as the factorizable-state analysis requires.  With
the opposite sign the roles of ``+`` and ``-`` are exchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import DimensionError, TruncationError

EXCITED = 0
GROUND = 1

#: Largest Poisson tail mass a coherent state may lose to the cutoff.
TAIL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SpaceSpec:
    """Photon-number cutoff of the truncated field mode."""

    n_max: int = 60

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def field_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    @classmethod
    def from_dim(cls, dim: int) -> SpaceSpec:
        if dim % 2 or dim < 4:
            raise DimensionError(f"composite dimension {dim} is not 2*(n_max+1)")
        return cls(dim // 2 - 1)


def coherent_tail_mass(alpha: complex, n_max: int) -> float:
    """Poisson weight of a coherent state above photon number ``n_max``."""
    return float(poisson.sf(n_max, abs(alpha) ** 2))


def coherent_state(alpha: complex, spec: SpaceSpec) -> np.ndarray:
    """Fock amplitudes of the coherent state ``|alpha>``.

    The vector is renormalized on the truncated space.  Raises
    :class:`TruncationError` when more than ``TAIL_TOLERANCE`` of the Poisson
    weight lies above ``spec.n_max``.
    """
    alpha = complex(alpha)
    tail = coherent_tail_mass(alpha, spec.n_max)
    if tail > TAIL_TOLERANCE:
        raise TruncationError(
            f"|alpha|={abs(alpha):.4g} loses {tail:.3g} of its weight above n_max={spec.n_max}"
        )
    n = np.arange(spec.field_dim)
    if alpha == 0:
        psi = np.zeros(spec.field_dim, dtype=complex)
        psi[0] = 1.0
        return psi
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    psi = np.exp(log_mag) * np.exp(1j * np.angle(alpha) * n)
    return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class Operators:
    """Composite-space operators for one cutoff.  Arrays are read-only."""

    a: np.ndarray
    a_dagger: np.ndarray
    sigma_minus: np.ndarray
    sigma_plus: np.ndarray
    sigma_z: np.ndarray
    number: np.ndarray
    identity: np.ndarray

    LABELS = ("a", "a_dagger", "sigma_minus", "sigma_plus", "sigma_z", "number", "identity")

    def __getitem__(self, label: str) -> np.ndarray:
        if label not in self.LABELS:
            raise KeyError(label)
        return getattr(self, label)

    @property
    def excited_projector(self) -> np.ndarray:
        return self.sigma_plus @ self.sigma_minus


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=complex)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=16)
def _operators(n_max: int) -> Operators:
    nf = n_max + 1
    a_f = np.diag(np.sqrt(np.arange(1, nf, dtype=float)), k=1)
    sm_atom = np.zeros((2, 2))
    sm_atom[GROUND, EXCITED] = -1.0
    sz_atom = np.diag([1.0, -1.0])
    i_f = np.eye(nf)
    i_a = np.eye(2)

    a = _frozen(np.kron(i_a, a_f))
    sm = _frozen(np.kron(sm_atom, i_f))
    return Operators(
        a=a,
        a_dagger=_frozen(a.conj().T),
        sigma_minus=sm,
        sigma_plus=_frozen(sm.conj().T),
        sigma_z=_frozen(np.kron(sz_atom, i_f)),
        number=_frozen(np.kron(i_a, np.diag(np.arange(nf, dtype=float)))),
        identity=_frozen(np.eye(2 * nf)),
    )


def build_operators(spec: SpaceSpec) -> Operators:
    """Return the cached operator set for ``spec``."""
    return _operators(spec.n_max)


def atom_state(c_e: complex, c_g: complex) -> np.ndarray:
    v = np.zeros(2, dtype=complex)
    v[EXCITED] = c_e
    v[GROUND] = c_g
    return v


def atom_field_product(atom: np.ndarray, field: np.ndarray) -> np.ndarray:
    """Kronecker product ``atom (x) field`` in the atom-major ordering, normalized."""
    atom = np.asarray(atom, dtype=complex)
    field = np.asarray(field, dtype=complex)
    if atom.shape != (2,) or field.ndim != 1 or field.size < 2:
        raise DimensionError(f"expected a 2-vector and a field vector, got {atom.shape} and {field.shape}")
    psi = np.kron(atom, field)
    return psi / np.linalg.norm(psi)


def normalize(psi: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def as_density(state: np.ndarray) -> np.ndarray:
    """Promote a ket to its projector; pass density matrices through."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    if state.ndim == 2 and state.shape[0] == state.shape[1]:
        return state
    raise DimensionError(f"not a state: shape {state.shape}")


def partial_trace_field(state: np.ndarray) -> np.ndarray:
    """Reduced 2x2 atomic density matrix of a ket or density matrix."""
    state = np.asarray(state, dtype=complex)
    d = state.shape[0]
    if d % 2:
        raise DimensionError(f"dimension {d} is not 2*(n_max+1)")
    nf = d // 2
    if state.ndim == 1:
        m = state.reshape(2, nf)
        return m @ m.conj().T
    return np.einsum("injn->ij", state.reshape(2, nf, 2, nf))


def partial_trace_atom(state: np.ndarray) -> np.ndarray:
    """Reduced field density matrix of a ket or density matrix."""
    state = np.asarray(state, dtype=complex)
    d = state.shape[0]
    if d % 2:
        raise DimensionError(f"dimension {d} is not 2*(n_max+1)")
    nf = d // 2
    if state.ndim == 1:
        m = state.reshape(2, nf)
        return m.T @ m.conj()
    return np.einsum("inim->nm", state.reshape(2, nf, 2, nf))


def expectation(op: np.ndarray, state: np.ndarray) -> complex:
    """``<psi|O|psi>`` for a ket or ``Tr(O rho)`` for a density matrix."""
    state = np.asarray(state)
    if op.shape[0] != state.shape[0]:
        raise DimensionError(f"operator {op.shape} does not act on state {state.shape}")
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    return complex(np.einsum("ij,ji->", op, state))
