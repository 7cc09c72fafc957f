"""Entanglement measures: entropy of entanglement, its short-time
approximation after an emission event, and the realignment criterion."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .dynamics import SystemParams, steady_state_values
from .errors import ApproximationWarning, DimensionError, InvalidDensityMatrix
from .hilbert import partial_trace_field

ZERO_EIGENVALUE = 1e-12
LN2 = np.log(2.0)


def entropy_bits(eigenvalues) -> float:
    """``-sum p log2 p`` with eigenvalues below ``ZERO_EIGENVALUE`` dropped."""
    p = np.asarray(eigenvalues, dtype=float)
    p = p[p > ZERO_EIGENVALUE]
    return max(0.0, float(-np.sum(p * np.log2(p))))  # no -0.0 or roundoff negatives


def binary_entropy(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return -(xlogy(p, p) + xlogy(1 - p, 1 - p)) / LN2


def entropy_of_entanglement(rho_atom: np.ndarray, atol: float = 1e-7) -> float:
    """Von Neumann entropy (bits) of a reduced qubit density matrix."""
    rho_atom = np.asarray(rho_atom, dtype=complex)
    if rho_atom.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got {rho_atom.shape}")
    if np.abs(rho_atom - rho_atom.conj().T).max() > 1e-9:
        raise InvalidDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho_atom) - 1) > 1e-8:
        raise InvalidDensityMatrix(f"trace {np.trace(rho_atom).real:.12g} != 1")
    evals = np.linalg.eigvalsh(rho_atom)
    if evals.min() < -atol:
        raise InvalidDensityMatrix(f"negative eigenvalue {evals.min():.3g}")
    return entropy_bits(evals)


def state_entropy(state: np.ndarray) -> float:
    """Entropy of the atomic reduction of a ket or density matrix.

    For a ket the Schmidt coefficients are used directly, which is exact to
    rounding even when the reduced matrix is nearly pure.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        m = state.reshape(2, -1)
        s = np.linalg.svd(m, compute_uv=False) ** 2
        return entropy_bits(s / s.sum())
    return entropy_of_entanglement(partial_trace_field(state))


# --- closed-form approximation after an emission event ----------------------


@dataclass(frozen=True)
class CollapseFunctions:
    u: float
    f1: float
    f2: float


def f1_shifted(u):
    """``H((1+u)/2) - 1``: the first collapse function offset by one.

    Evaluates to -1 at u = 1 and 0 at u = 0, so it cannot describe a state
    that starts unentangled.  Kept for comparison.
    """
    u = _check_overlap(u)
    return -(xlogy(1 - u, 1 - u) + xlogy(1 + u, 1 + u)) / np.log(4.0)


def f1_corrected(u):
    """Shifted f1 plus one: the binary entropy ``H((1+u)/2)`` of the Schmidt weights."""
    return 1.0 + f1_shifted(u)


def f2(u):
    u = _check_overlap(u)
    return (2 * u * (1 - LN2) - xlogy(1 - u, 1 - u) + xlogy(1 + u, 1 + u)) / np.log(16.0)


def _check_overlap(u):
    u = np.asarray(u, dtype=float)
    if np.any((u < 0) | (u > 1)) or not np.all(np.isfinite(u)):
        raise ValueError("overlap parameter u must lie in [0, 1]")
    return u


def collapse_functions(u: float) -> CollapseFunctions:
    """Corrected f1 and f2 at overlap ``u`` (u = 1 via the analytic limit)."""
    return CollapseFunctions(u=float(u), f1=float(f1_corrected(u)), f2=float(f2(u)))


def approx_entropy(t, params: SystemParams, r: float | None = None, corrected: bool = True):
    """Short-time entanglement after an emission event, clamped to [0, 1].

    ``E = f1(u) - f2(u) sin(2 g r t) g t / r - (g t / r)^2 / (8 ln 2)`` with
    ``u = exp(-g^2 t^2 / 2)``; ``r`` defaults to the steady-state amplitude.
    ``corrected=False`` uses the shifted f1 (kept for comparison only).
    """
    t = np.asarray(t, dtype=float)
    g = params.g
    if r is None:
        r = steady_state_values(params)[1]
    x = g * t / r
    if np.any(x / 2 > 0.5):
        warnings.warn(
            f"g t / 2r reaches {np.max(x) / 2:.3g}; short-time approximation degrading",
            ApproximationWarning,
            stacklevel=2,
        )
    u = np.exp(-0.5 * (g * t) ** 2)
    first = f1_corrected(u) if corrected else f1_shifted(u)
    e = first - f2(u) * np.sin(2 * g * r * t) * x - x**2 / (8 * LN2)
    e = np.clip(e, 0.0, 1.0)
    return float(e) if e.ndim == 0 else e


# --- realignment criterion ----------------------------------------------------


def realign(rho: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Realigned matrix ``R[(i,j),(k,l)] = rho[(i,k),(j,l)]`` of shape (dim_a^2, dim_b^2)."""
    rho = np.asarray(rho)
    if rho.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionError(f"matrix {rho.shape} is not ({dim_a}*{dim_b})^2")
    return rho.reshape(dim_a, dim_b, dim_a, dim_b).transpose(0, 2, 1, 3).reshape(dim_a**2, dim_b**2)


def realignment_trace_norm(rho: np.ndarray, dim_a: int, dim_b: int) -> float:
    """Trace norm of the realigned matrix; values above 1 certify entanglement."""
    return float(np.linalg.svd(realign(rho, dim_a, dim_b), compute_uv=False).sum())


def schematic_post_collapse_mixture(phi_ss: float, literal: bool = False) -> np.ndarray:
    """Equal mixture of the two post-collapse branches on a qubit (x) 4-level field.

    The four field states are taken to be orthonormal.  Ordering is atom-major,
    atom basis (e, g), as in :mod:`driven_cavity.hilbert`.  Both l components
    carry the atomic phase ``e^{-i phi_ss}``; ``literal=True`` gives the fourth
    term ``e^{+i phi_ss}`` instead, a variant whose trace norm is not sqrt2.
    """
    if not 0 < phi_ss < np.pi / 2:
        raise ValueError("phi_ss must lie in (0, pi/2)")
    field = np.eye(4)

    def atom(c_e, c_g):
        return np.array([c_e, c_g], dtype=complex)

    w = np.exp(1j * phi_ss)
    psi_u = -0.5 * np.kron(atom(w, -1), field[0]) + 0.5 * np.kron(atom(w, 1), field[1])
    w4 = w if literal else np.conj(w)
    psi_l = 0.5 * np.kron(atom(np.conj(w), 1), field[2]) - 0.5 * np.kron(atom(w4, -1), field[3])
    return 0.5 * np.outer(psi_u, psi_u.conj()) + 0.5 * np.outer(psi_l, psi_l.conj())
