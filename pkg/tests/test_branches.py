import math
import warnings

import numpy as np
import pytest

from driven_cavity import (
    SpaceSpec,
    SystemParams,
    branch_state,
    branch_superposition,
    build_operators,
    coherent_state,
    conditional_steady_superposition,
    decoherence_factor,
    expectation,
    field_orthogonality,
    integrate_master,
    partial_trace_field,
    post_emission_collapse,
    special_state,
    state_entropy,
    steady_state_values,
)
from driven_cavity.branches import branch_field_overlap, branch_terms
from driven_cavity.errors import ApproximationWarning, TruncationError, WeakDrivingError, ZeroAmplitudeError
from driven_cavity.hilbert import atom_field_product, atom_state


def fidelity(psi, phi):
    return abs(np.vdot(psi, phi)) ** 2


def ket(c_e, c_g, alpha, spec):
    return atom_field_product(atom_state(c_e, c_g), coherent_state(alpha, spec))


@pytest.fixture(scope="module")
def ss(fig1):
    return steady_state_values(fig1)


class TestSpecialState:
    @pytest.mark.parametrize("sign,r0,phi0", [(1, 3.9, -0.8), (-1, 3.9, 0.8), (1, 1.0, 2.0)])
    def test_unentangled(self, sign, r0, phi0, spec):
        assert state_entropy(special_state(sign, r0, phi0, spec)) < 1e-10

    def test_vacuum_case(self):
        spec = SpaceSpec(5)
        expected = np.zeros(spec.dim, complex)
        expected[0] = expected[6] = 1 / math.sqrt(2)
        np.testing.assert_allclose(special_state(1, 0.0, 0.0, spec), expected, atol=1e-15)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_dipole_phase_convention(self, sign, spec):
        # <s_-> = -sign * e^{-i phi0} / 2 with s_- = -|g><e|
        phi0 = 0.3
        psi = special_state(sign, 2.0, phi0, spec)
        dipole = expectation(build_operators(spec).sigma_minus, psi)
        assert abs(dipole - (-sign * 0.5 * np.exp(-1j * phi0))) < 1e-12

    def test_field_is_the_stated_coherent_state(self, spec):
        psi = special_state(-1, 2.5, 0.4, spec)
        expected = np.kron(np.array([np.exp(-0.4j), -1]) / math.sqrt(2), coherent_state(2.5 * np.exp(-0.4j), spec))
        np.testing.assert_allclose(psi, expected, atol=1e-14)

    def test_truncation(self):
        with pytest.raises(TruncationError):
            special_state(1, 8.0, 0.0, SpaceSpec(30))

    def test_bad_sign(self, spec):
        with pytest.raises(ValueError):
            special_state(0, 1.0, 0.0, spec)


class TestConditionalSuperposition:
    def test_warns_when_fields_overlap(self, fig1, spec):
        with pytest.warns(ApproximationWarning, match="r_ss sin"):
            conditional_steady_superposition(fig1, 0.0, spec)

    def test_no_warning_when_well_separated(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error", ApproximationWarning)
            conditional_steady_superposition(WIDE, 0.0, WIDE_SPEC)

    def test_reduced_matrix(self, fig1, spec, ss, quiet):
        phi_ss, _ = ss
        rho_a = partial_trace_field(conditional_steady_superposition(fig1, 0.0, spec))
        # oracle: the closed-form atomic states with orthogonal fields
        up = np.array([np.exp(1j * phi_ss), 1]) / math.sqrt(2)
        low = np.array([np.exp(-1j * phi_ss), -1]) / math.sqrt(2)
        oracle = 0.5 * (np.outer(up, up.conj()) + np.outer(low, low.conj()))
        np.testing.assert_allclose(rho_a, oracle, atol=1e-6)
        assert rho_a[0, 1] == pytest.approx(0.5j * math.sin(phi_ss), abs=1e-6)
        evals = np.linalg.eigvalsh(rho_a)
        np.testing.assert_allclose(evals, [(1 - math.sin(phi_ss)) / 2, (1 + math.sin(phi_ss)) / 2], atol=1e-6)

    def test_entropy_value(self, fig1, spec, quiet):
        assert state_entropy(conditional_steady_superposition(fig1, 0.0, spec)) == pytest.approx(0.592, abs=1e-3)

    @pytest.mark.parametrize("phase", [0.0, 1.0, math.pi, 5.0])
    def test_normalized(self, fig1, spec, phase, quiet):
        assert abs(np.linalg.norm(conditional_steady_superposition(fig1, phase, spec)) - 1) < 1e-9

    def test_weak_driving(self, spec):
        with pytest.raises(WeakDrivingError):
            conditional_steady_superposition(SystemParams(0.4, 0.125), 0.0, spec)


class TestCollapse:
    @pytest.mark.parametrize("phase", [0.0, 0.4, 2.5])
    def test_four_term_form(self, fig1, spec, ss, phase, quiet):
        # the e^{+-i phi_ss} atomic amplitudes shift the relative phase by 2 phi_ss
        phi_ss, r_ss = ss
        out = post_emission_collapse(conditional_steady_superposition(fig1, phase, spec))
        alpha = r_ss * np.exp(1j * phi_ss)
        field = coherent_state(alpha, spec) + np.exp(-1j * (phase + 2 * phi_ss)) * coherent_state(alpha.conjugate(), spec)
        expected = atom_field_product(atom_state(0, 1), field)
        assert fidelity(out, expected) > 1 - 1e-8

    def test_excited_coherent(self, spec):
        out = post_emission_collapse(ket(1, 0, 1.5, spec))
        assert fidelity(out, ket(0, 1, 1.5, spec)) == pytest.approx(1, abs=1e-12)

    def test_ground_state_refused(self, spec):
        with pytest.raises(ZeroAmplitudeError):
            post_emission_collapse(ket(0, 1, 1.5, spec))


class TestBranchState:
    def test_initial_u_branch(self, fig1, spec, ss):
        phi_ss, r_ss = ss
        psi = branch_state("u", 0.0, fig1, spec)
        assert np.abs(psi - ket(0, 1, r_ss * np.exp(1j * phi_ss), spec)).max() < 1e-10

    def test_initial_l_branch(self, fig1, spec, ss):
        phi_ss, r_ss = ss
        psi = branch_state("l", 0.0, fig1, spec)
        assert fidelity(psi, ket(0, 1, r_ss * np.exp(-1j * phi_ss), spec)) > 1 - 1e-10

    def test_late_entropy(self, fig1, spec, quiet):
        assert state_entropy(branch_state("u", 3.0, fig1, spec)) >= 0.85

    def test_component_overlap(self, fig1, spec, quiet):
        for t in np.linspace(0, 2, 9):
            a, b = branch_terms("u", t, fig1).components(spec)
            fields = [c.reshape(2, -1)[1] / np.linalg.norm(c.reshape(2, -1)[1]) for c in (a, b)]
            measured = abs(np.vdot(*fields))
            assert measured == pytest.approx(branch_field_overlap(t, fig1), abs=1e-8)
            assert abs(measured - math.exp(-(t**2) / 2)) < 0.02

    def test_u_and_l_are_mirror_images(self, fig1, spec):
        u = branch_state("u", 0.7, fig1, spec)
        l_ = branch_state("l", 0.7, fig1, spec)
        assert abs(state_entropy(u) - state_entropy(l_)) < 1e-12

    def test_warns_past_short_time(self, fig1, spec):
        with pytest.warns(ApproximationWarning, match="short-time"):
            branch_state("u", 3.0, fig1, spec)

    def test_rejects_negative_time_and_bad_branch(self, fig1, spec):
        with pytest.raises(ValueError):
            branch_state("u", -0.1, fig1, spec)
        with pytest.raises(ValueError):
            branch_state("x", 0.1, fig1, spec)

    def test_instantaneous_override(self, fig1, spec):
        psi = branch_state("u", 0.0, fig1, spec, r=2.0, phi=0.3)
        assert fidelity(psi, ket(0, 1, 2.0 * np.exp(0.3j), spec)) > 1 - 1e-10

    def test_weak_driving(self, spec):
        with pytest.raises(WeakDrivingError):
            branch_state("u", 0.5, SystemParams(0.4, 0.125), spec)


# r_ss sin(phi_ss) = 7: every u field stays orthogonal to every l field up to g t = 3
WIDE = SystemParams(0.7, 0.05)
WIDE_SPEC = SpaceSpec(180)


class TestBranchSuperposition:
    def test_phase_independent_entropy(self, quiet):
        values = [state_entropy(branch_superposition(3.0, WIDE, ph, WIDE_SPEC)) for ph in (0, 1, 2, 4)]
        assert max(values) - min(values) < 1e-6

    @pytest.mark.xfail(strict=True, reason="at g t = 3 the rotating u and l fields sit at phases -+0.03 and overlap")
    def test_phase_independent_entropy_figure_rates(self, fig1, spec, quiet):
        values = [state_entropy(branch_superposition(3.0, fig1, ph, spec)) for ph in (0, 1, 2, 4)]
        assert max(values) - min(values) < 1e-6

    # the two branches reduce to mirror-image atom states, so the mixture only matches
    # a single branch once both are close to maximally mixed, after the collapse time
    @pytest.mark.parametrize("t", [2.0, 3.0])
    def test_matches_single_branch(self, t, quiet):
        both = state_entropy(branch_superposition(t, WIDE, 0.3, WIDE_SPEC))
        assert abs(both - state_entropy(branch_state("u", t, WIDE, WIDE_SPEC))) < 0.02

    @pytest.mark.parametrize("phase", [0.0, 1.3])
    def test_initial_equals_collapse(self, fig1, spec, ss, phase, quiet):
        phi_ss, _ = ss
        collapsed = post_emission_collapse(conditional_steady_superposition(fig1, phase, spec))
        assert fidelity(branch_superposition(0.0, fig1, phase + 2 * phi_ss, spec), collapsed) > 1 - 1e-8

    def test_normalized(self, fig1, spec, quiet):
        for t in (0.0, 0.9, 2.5):
            assert abs(np.linalg.norm(branch_superposition(t, fig1, 0.7, spec)) - 1) < 1e-9


class TestAgainstMasterEquation:
    """Each branch against the exact evolution of the collapsed conditional state.

    Cavity loss destroys the u-l coherence within about 0.1/g (the two fields
    differ by 2 r_ss sin(phi_ss)), so each branch is scored on its own half:
    ``2 <b|rho|b>``.
    """

    @staticmethod
    def branch_fidelities(fig1, spec, run):
        out = []
        for t, rho in zip(run.times, run.states):
            out.append([2 * np.vdot(b, rho @ b).real for b in (branch_state(x, t, fig1, spec) for x in "ul")])
        return np.array(out)

    def test_fidelity_high_for_short_times(self, fig1, spec, collapsed_run, quiet):
        fid = self.branch_fidelities(fig1, spec, collapsed_run)
        assert fid[collapsed_run.times <= 1.2].min() >= 0.95

    @pytest.mark.xfail(strict=True, reason="cavity decoherence inside each branch brings the fidelity to about 0.8 by g t = 2")
    def test_fidelity_over_full_window(self, fig1, spec, collapsed_run, quiet):
        assert self.branch_fidelities(fig1, spec, collapsed_run).min() >= 0.95


class TestDecoherence:
    def test_values(self, fig1):
        assert decoherence_factor(0.0, fig1) == 1
        assert decoherence_factor(2.0, fig1) == pytest.approx(math.exp(-1 / 3), abs=1e-12)
        assert decoherence_factor(2.0, fig1) == pytest.approx(0.7165, abs=1e-4)

    def test_strictly_decreasing(self, fig1):
        d = decoherence_factor(np.linspace(0, 5, 200), fig1)
        assert np.all(np.diff(d) < 0)

    def test_negative_time(self, fig1):
        with pytest.raises(ValueError):
            decoherence_factor(-1.0, fig1)

    @pytest.mark.slow
    def test_matches_master_equation(self, fig1, spec, ss):
        # coherence between the two components of the u branch, read from the purity
        phi_ss, r_ss = ss
        psi0 = ket(0, 1, r_ss * np.exp(1j * phi_ss), spec)
        run = integrate_master(np.outer(psi0, psi0.conj()), fig1, 2.0, 0.002, stride=250)
        for t, rho in zip(run.times[1:], run.states[1:]):
            purity = np.trace(rho @ rho).real
            measured = -math.log(math.sqrt(2 * purity - 1))
            predicted = -math.log(decoherence_factor(t, fig1))
            assert 0.5 < measured / predicted < 2


class TestFieldOrthogonality:
    def test_equal_phases(self):
        assert field_orthogonality(3.0, 0.4, 0.4) == 1

    def test_figure_value(self, ss):
        phi_ss, r_ss = ss
        value = field_orthogonality(r_ss, phi_ss, -phi_ss)
        assert value == pytest.approx(math.exp(-2 * (r_ss * math.sin(phi_ss)) ** 2), rel=1e-12)
        assert value < 1e-6

    @pytest.mark.xfail(strict=True, reason="the closed form gives 1.56e-7 at the figure rates, not 4.2e-4")
    def test_quoted_figure_value(self, ss):
        phi_ss, r_ss = ss
        assert field_orthogonality(r_ss, phi_ss, -phi_ss) == pytest.approx(4.2e-4, rel=0.05)

    def test_matches_inner_product(self, spec):
        a, b = coherent_state(3.0 * np.exp(0.5j), spec), coherent_state(3.0 * np.exp(-0.2j), spec)
        assert abs(abs(np.vdot(a, b)) - field_orthogonality(3.0, 0.5, -0.2)) < 1e-6

    def test_negative_amplitude(self):
        with pytest.raises(ValueError):
            field_orthogonality(-1.0, 0, 0)
