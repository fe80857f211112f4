import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wavecat import optics
from wavecat.hilbert import HilbertError, StateVector, basis_state, inner, superpose
from wavecat.optics import (
    MODE_SPACE,
    PATH,
    TOOLBOX_SPACE,
    ToolboxParams,
    bs3,
    bs_sym,
    hwp,
    hwp_path1,
    particle_state,
    pbs,
    phase_shifter,
    sigma1234,
    toolbox,
    wave_router,
    wave_state,
)

SQ = 1 / np.sqrt(2)
angles = st.floats(min_value=-2 * np.pi, max_value=2 * np.pi, allow_nan=False)


def mode(label):
    return basis_state(MODE_SPACE, [label])


def wave_formula(phi1):
    # written out component by component; independent of optics.wave_state
    h = phi1 / 2
    return np.array([np.exp(1j * h) * np.cos(h), 0, -1j * np.exp(1j * h) * np.sin(h), 0])


def particle_formula(phi2):
    return np.array([0, SQ, 0, SQ * np.exp(1j * phi2)])


@pytest.mark.parametrize(
    "element",
    [pbs(), hwp_path1(), bs_sym(("1", "3")), bs_sym(("2", "4")), phase_shifter("3", 0.9), sigma1234(), bs3(),
     wave_router(0.3), wave_router(2.1)],
    ids=lambda e: e.name,
)
def test_elements_unitary(element):
    assert element.unitary.unitarity_error() <= 1e-12


class TestPBS:
    def test_polarization_sorting(self):
        a = 0.37
        state = superpose(
            [(np.cos(a), basis_state(TOOLBOX_SPACE, ["H", "a"])), (np.sin(a), basis_state(TOOLBOX_SPACE, ["V", "a"]))]
        )
        out = pbs().unitary.apply(state)
        want = superpose(
            [(np.cos(a), basis_state(TOOLBOX_SPACE, ["H", "1"])), (np.sin(a), basis_state(TOOLBOX_SPACE, ["V", "2"]))]
        )
        assert out.allclose(want, 1e-15)

    def test_horizontal_only(self):
        out = pbs().unitary.apply(basis_state(TOOLBOX_SPACE, ["H", "a"]))
        assert out.allclose(basis_state(TOOLBOX_SPACE, ["H", "1"]), 0)

    def test_ports_must_differ(self):
        with pytest.raises(HilbertError):
            pbs(("a", "1", "1"))


class TestHWP:
    def test_flips_on_path1(self):
        out = hwp_path1().unitary.apply(basis_state(TOOLBOX_SPACE, ["H", "1"]))
        assert out.allclose(basis_state(TOOLBOX_SPACE, ["V", "1"]), 0)

    def test_path2_untouched(self):
        s = basis_state(TOOLBOX_SPACE, ["V", "2"])
        assert hwp_path1().unitary.apply(s).allclose(s, 0)

    def test_involution(self):
        u = hwp_path1().matrix
        np.testing.assert_array_equal(u @ u, np.eye(10))


class TestBeamSplitters:
    @given(angles)
    def test_recombination_gives_wave_form(self, phi):
        s = StateVector(MODE_SPACE, [SQ, 0, SQ * np.exp(1j * phi), 0])
        out = bs_sym(("1", "3")).unitary.apply(s)
        np.testing.assert_allclose(out.amplitudes, wave_formula(phi), atol=1e-12)

    def test_mach_zehnder_zero_phase(self):
        u = bs_sym(("1", "3")).unitary
        split = u.apply(mode("1"))
        np.testing.assert_allclose(split.amplitudes, [SQ, 0, SQ, 0])
        assert u.apply(split).allclose(mode("1"), 1e-15)

    def test_duplicate_ports(self):
        with pytest.raises(HilbertError):
            bs_sym(("2", "2"))

    def test_bs3_mapping(self):
        u = bs3().matrix
        # columns are the images of |L>, |R>
        np.testing.assert_allclose(u[:, 0], [-SQ, SQ])
        np.testing.assert_allclose(u[:, 1], [SQ, SQ])

    def test_bs3_plus_to_right(self):
        out = bs3().matrix @ np.array([SQ, SQ])
        np.testing.assert_allclose(out, [0, 1], atol=1e-15)

    def test_bs3_minus_to_left(self):
        out = bs3().matrix @ np.array([-SQ, SQ])
        np.testing.assert_allclose(out, [1, 0], atol=1e-15)


class TestPhaseShifter:
    def test_adds_relative_phase(self):
        s = StateVector(MODE_SPACE, [SQ, 0, SQ, 0])
        out = phase_shifter("3", 1.1).unitary.apply(s)
        np.testing.assert_allclose(out.amplitudes, [SQ, 0, SQ * np.exp(1.1j), 0])

    def test_zero_and_two_pi(self):
        np.testing.assert_array_equal(phase_shifter("3", 0).matrix, np.eye(4))
        assert np.max(np.abs(phase_shifter("3", 2 * np.pi).matrix - np.eye(4))) <= 1e-12

    def test_invalid_mode(self):
        with pytest.raises(HilbertError):
            phase_shifter("7", 0.1)


class TestSigma1234:
    def test_swaps(self):
        u = sigma1234().unitary
        assert u.apply(mode("2")).allclose(mode("1"), 0)
        assert u.apply(mode("4")).allclose(mode("3"), 0)

    def test_order_two(self):
        u = sigma1234().matrix
        np.testing.assert_array_equal(u @ u, np.eye(4))

    @given(angles)
    def test_particle_to_wave_chain(self, phi):
        # BS on (2, 4) then sigma1234 maps the particle state to the wave state, phase included
        out = sigma1234().unitary.apply(bs_sym(("2", "4")).unitary.apply(particle_state(phi)))
        np.testing.assert_allclose(out.amplitudes, wave_formula(phi), atol=1e-12)


class TestStates:
    def test_wave_at_zero(self):
        assert wave_state(0).allclose(mode("1"), 0)

    @given(angles)
    def test_formulas(self, phi):
        np.testing.assert_allclose(wave_state(phi).amplitudes, wave_formula(phi), atol=1e-15)
        np.testing.assert_allclose(particle_state(phi).amplitudes, particle_formula(phi), atol=1e-15)

    @given(angles, angles)
    def test_wave_particle_orthogonal(self, p1, p2):
        assert inner(wave_state(p1), particle_state(p2)) == 0

    @pytest.mark.parametrize("phi2", np.linspace(0, 2 * np.pi, 9))
    def test_particle_mode2_half(self, phi2):
        assert particle_state(phi2).probabilities()[1] == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("phi1", np.linspace(0, 2 * np.pi, 9))
    def test_wave_mode1_depends_on_phase(self, phi1):
        assert wave_state(phi1).probabilities()[0] == pytest.approx(np.cos(phi1 / 2) ** 2, abs=1e-15)

    @given(angles, angles)
    def test_complements_orthonormal_basis(self, p1, p2):
        basis = np.array(
            [
                wave_state(p1).amplitudes,
                optics.wave_complement(p1).amplitudes,
                particle_state(p2).amplitudes,
                optics.particle_complement(p2).amplitudes,
            ]
        )
        assert np.max(np.abs(basis.conj() @ basis.T - np.eye(4))) <= 1e-12


class TestWaveRouter:
    def test_wave_transmitted(self):
        assert optics.transmit_probability(wave_state(0.8), 0.8) == pytest.approx(1, abs=1e-12)

    def test_particle_reflected(self):
        assert optics.transmit_probability(particle_state(0.8), 0.8) == pytest.approx(0, abs=1e-12)

    def test_half_and_half(self):
        s = superpose([(1, wave_state(0.8)), (1, particle_state(0.8))], normalize=True)
        assert optics.transmit_probability(s, 0.8) == pytest.approx(0.5, abs=1e-12)

    def test_wave_complement_not_transmitted(self):
        assert optics.transmit_probability(optics.wave_complement(0.8), 0.8) == pytest.approx(0, abs=1e-12)


class TestToolbox:
    def test_alpha_zero_is_wave(self):
        out = toolbox(ToolboxParams(0.0, 0.9))
        np.testing.assert_allclose(out.amplitudes, wave_formula(0.9), atol=1e-12)

    def test_alpha_half_pi_is_particle(self):
        out = toolbox(ToolboxParams(np.pi / 2, 0.9))
        np.testing.assert_allclose(out.amplitudes, particle_formula(0.9), atol=1e-12)

    def test_equal_superposition(self):
        out = toolbox(ToolboxParams(np.pi / 4, np.pi / 3))
        want = SQ * (wave_formula(np.pi / 3) + particle_formula(np.pi / 3))
        np.testing.assert_allclose(out.amplitudes, want, atol=1e-12)

    @pytest.mark.parametrize(
        "alpha,phi1,phi2",
        list(itertools.product([0.0, 0.4, 1.1], [0.0, 1.3, 4.0], [0.0, 2.2])),
    )
    def test_grid_against_formula(self, alpha, phi1, phi2, quiet_unequal_phases):
        out = toolbox(ToolboxParams(alpha, phi1, phi2))
        want = np.cos(alpha) * wave_formula(phi1) + np.sin(alpha) * particle_formula(phi2)
        assert np.max(np.abs(out.amplitudes - want)) <= 1e-12
        assert out.is_normalized()

    def test_unequal_phases_warn(self):
        with pytest.warns(optics.UnequalPhaseWarning):
            toolbox(ToolboxParams(0.3, 0.1, 0.2))

    def test_polarization_factors_out(self):
        state = optics.toolbox_input(0.6)
        for el in optics.toolbox_elements(ToolboxParams(0.6, 0.5)):
            state = el.on(TOOLBOX_SPACE).apply(state)
        # every photon leaves vertically polarized
        assert state.marginal("pol") == pytest.approx([0, 1], abs=1e-15)
        assert state.marginal("path")[PATH.index("a")] == pytest.approx(0, abs=1e-15)

    def test_entangled_polarization_rejected(self):
        # skip the HWP: H stays on path 1, V on path 2
        state = optics.toolbox_input(0.6)
        state = pbs().on(TOOLBOX_SPACE).apply(state)
        with pytest.raises(HilbertError, match="separable"):
            optics.drop_polarization(state)
