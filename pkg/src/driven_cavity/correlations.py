"""Intensity-field correlation h^FT(tau): the transmitted-field quadrature
conditioned on a fluorescence detection at tau = 0, normalized by its
unconditioned mean.

    h(tau) = <s_+(0) a_theta(tau) s_-(0)> / (<s_+ s_-> <a_theta>)

with ``a_theta = (a e^{-i theta} + a^+ e^{i theta}) / 2``.  The default
``theta = 0`` is aligned with the real mean steady-state field.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .branches import SHORT_TIME_LIMIT, branch_terms
from .dynamics import SystemParams, integrate_master, steady_state_mixture, steady_state_values
from .errors import ApproximationWarning, NormalizationError
from .hilbert import SpaceSpec, build_operators, expectation


@dataclass(frozen=True)
class QuadratureSpec:
    theta: float = 0.0

    def operator(self, spec: SpaceSpec) -> np.ndarray:
        ops = build_operators(spec)
        return 0.5 * (ops.a * np.exp(-1j * self.theta) + ops.a_dagger * np.exp(1j * self.theta))


@dataclass
class HftSeries:
    taus: np.ndarray
    values: np.ndarray
    excited_population: float = float("nan")
    mean_quadrature: float = float("nan")
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.taus)


def _uniform_stride(taus: np.ndarray, dt: float) -> int:
    if taus[0] != 0:
        raise ValueError("tau grid must start at 0")
    if len(taus) == 1:
        return 1
    step = taus[1] - taus[0]
    stride = int(round(step / dt))
    if stride < 1 or not np.allclose(taus, np.arange(len(taus)) * stride * dt, rtol=0, atol=1e-9):
        raise ValueError("tau grid must be uniform with spacing a multiple of dt")
    return stride


def hft_numeric(
    rho_init: np.ndarray,
    params: SystemParams,
    quad: QuadratureSpec = QuadratureSpec(),
    taus=None,
    dt: float = 0.002,
) -> HftSeries:
    """Conditioned-evolution h^FT from the master equation.

    The state is conditioned on one emission, ``s_- rho s_+ / Tr``, then
    evolved; ``taus`` must be a uniform grid from 0 with spacing a multiple
    of ``dt``.
    """
    rho = np.asarray(rho_init, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    spec = SpaceSpec.from_dim(rho.shape[0])
    ops = build_operators(spec)
    a_theta = quad.operator(spec)
    taus = np.asarray(taus if taus is not None else np.arange(0, 201) * 0.01, dtype=float)
    stride = _uniform_stride(taus, dt)

    excited = expectation(ops.excited_projector, rho).real
    mean_q = expectation(a_theta, rho).real
    if excited <= 1e-10:
        raise NormalizationError(f"excited population {excited:.3g} too small to condition on")
    if abs(mean_q) <= 1e-12:
        raise NormalizationError("unconditioned quadrature mean vanishes")

    conditioned = ops.sigma_minus @ rho @ ops.sigma_plus
    conditioned /= np.trace(conditioned).real
    run = integrate_master(
        conditioned, params, taus[-1], dt, stride=stride, observe=lambda m: expectation(a_theta, m).real
    )
    return HftSeries(
        taus=run.times,
        values=np.asarray(run.states) / mean_q,
        excited_population=excited,
        mean_quadrature=mean_q,
        meta={"theta": quad.theta, "method": "master", "dt": dt},
    )


def _branch_quadrature(t, params, spec, a_theta, coherent, renormalize, r, phi) -> float:
    total = 0.0
    for branch in ("u", "l"):
        state = branch_terms(branch, t, params, r, phi)
        if coherent:
            psi = state.ket(spec) if renormalize else sum(state.components(spec))
            total += 0.5 * expectation(a_theta, psi).real
        else:
            comps = state.components(spec)
            weights = [np.vdot(c, c).real for c in comps]
            for c, w in zip(comps, weights):
                total += 0.5 * (w / sum(weights)) * expectation(a_theta, c / np.sqrt(w)).real
    return total


def hft_from_branches(
    ts,
    params: SystemParams,
    quad: QuadratureSpec = QuadratureSpec(),
    coherent: bool = True,
    spec: SpaceSpec | None = None,
    r: float | None = None,
    phi: float | None = None,
    renormalize: bool = False,
) -> HftSeries:
    """h^FT evaluated on the post-emission branch states.

    The u and l branches enter with weight 1/2 each.  ``coherent=False``
    replaces each branch by the equal mixture of its two components, which
    drops every cross term.  Normalized by ``<a_theta>`` of the incoherent
    steady-state mixture.

    By default each branch keeps its nominal ``1/sqrt2`` weights, as in the
    short-time closed form, so the cross term between the two components is
    not divided out by the branch norm.  ``renormalize=True`` uses the exactly
    normalized branch vectors instead; that version tracks the full master
    equation more closely but its Rabi term is much weaker, because the norm
    ``1 + (du/2) sin(2 g r t)`` cancels the cross term to leading order.
    """
    spec = spec or SpaceSpec()
    ts = np.asarray(ts, dtype=float)
    a_theta = quad.operator(spec)
    mean_q = expectation(a_theta, steady_state_mixture(params, spec)).real
    if abs(mean_q) <= 1e-12:
        raise NormalizationError("steady-state quadrature mean vanishes")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ApproximationWarning)
        values = np.array([_branch_quadrature(t, params, spec, a_theta, coherent, renormalize, r, phi) for t in ts])
    r_used = r if r is not None else steady_state_values(params)[1]
    if ts.size and params.g * ts.max() / r_used > SHORT_TIME_LIMIT:
        warnings.warn(
            f"g t / r reaches {params.g * ts.max() / r_used:.3g}; short-time branch form degrading",
            ApproximationWarning,
            stacklevel=2,
        )
    return HftSeries(
        taus=ts,
        values=values / mean_q,
        mean_quadrature=mean_q,
        meta={"theta": quad.theta, "method": "branches", "coherent": coherent, "renormalize": renormalize},
    )


def hft_approx(ts, params: SystemParams, coherent: bool = True) -> HftSeries:
    """Short-time closed form
    ``h - 1 = (tan phi_ss + u sin(2 g r_ss t)) g t / (2 r_ss) - (g t / r_ss)^2 / 4``
    with ``u = exp(-g^2 t^2 / 2)``; ``coherent=False`` sets ``u = 0``.
    """
    ts = np.asarray(ts, dtype=float)
    phi_ss, r_ss = steady_state_values(params)
    g = params.g
    x = g * ts / r_ss
    if ts.size and x.max() > SHORT_TIME_LIMIT:
        warnings.warn(
            f"g t / r_ss reaches {x.max():.3g}; approximation degrading", ApproximationWarning, stacklevel=2
        )
    u = np.exp(-0.5 * (g * ts) ** 2) if coherent else 0.0
    h = 1 + (np.tan(phi_ss) + u * np.sin(2 * g * r_ss * ts)) * x / 2 - x**2 / 4
    return HftSeries(taus=ts, values=h, meta={"method": "approx", "coherent": coherent})
