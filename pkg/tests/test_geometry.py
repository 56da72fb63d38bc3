"""Array construction, free-space gains, replica rays."""

import math

import numpy as np
import pytest

from simosounder.geometry import (
    ArrayLayout,
    ElementPlacement,
    InvalidGeometryError,
    InvalidRayError,
    RayPath,
    Scenario,
    build_pi,
    build_ula,
    los_gains,
    polarization_match,
    replica_gains,
)

C = 299792458.0


def fspl_db(distance_m: float, wavelength_m: float) -> float:
    """Independent free-space path-loss oracle: 20 log10(4 pi d / lambda)."""
    return 20.0 * math.log10(4.0 * math.pi * distance_m / wavelength_m)


class TestScenario:
    def test_wavelength(self):
        sc = Scenario.standard()
        assert sc.wavelength_m == pytest.approx(C / 2.4e9, rel=1e-15)
        assert sc.wavelength_m == pytest.approx(0.124914, abs=1e-6)

    def test_standard_link_is_centered(self):
        sc = Scenario.standard()
        assert sc.tx_position == pytest.approx([4.5, 3.75, 1.5])
        assert sc.rx_centroid == pytest.approx([4.5, 8.25, 1.5])

    def test_distance_consistency_enforced(self):
        with pytest.raises(InvalidGeometryError):
            Scenario(tx_position=(0, 0, 1.5), rx_centroid=(0, 3.0, 1.5),
                     tx_rx_distance_m=4.5)

    def test_polarization_must_be_unit(self):
        with pytest.raises(InvalidGeometryError):
            Scenario.standard(tx_polarization=(0, 0, 2.0))


class TestBuildUla:
    def test_half_wavelength_spacing(self):
        sc = Scenario.standard()
        lay = build_ula(sc.wavelength_m / 2.0, sc.rx_centroid)
        pos = lay.positions()
        step = np.linalg.norm(pos[1] - pos[0])
        assert step == pytest.approx(0.06246, abs=1e-5)
        assert len(lay) == 4 and lay.kind == "ula"

    def test_full_wavelength_spacing(self):
        sc = Scenario.standard()
        lay = build_ula(sc.wavelength_m, sc.rx_centroid)
        step = np.linalg.norm(lay.positions()[1] - lay.positions()[0])
        assert step == pytest.approx(0.124914, abs=1e-6)

    def test_common_polarization(self):
        lay = build_ula(0.0625, (0, 0, 0), polarization=(0, 0, 1))
        for el in lay.elements:
            assert el.polarization == pytest.approx([0, 0, 1])

    def test_zero_spacing_rejected(self):
        with pytest.raises(InvalidGeometryError):
            build_ula(0.0, (0, 0, 0))

    def test_layout_validation_catches_non_uniform_spacing(self):
        els = [
            ElementPlacement((0, 0, 0), (0, 0, 1)),
            ElementPlacement((0.1, 0, 0), (0, 0, 1)),
            ElementPlacement((0.25, 0, 0), (0, 0, 1)),
        ]
        with pytest.raises(InvalidGeometryError):
            ArrayLayout("ula", els)

    def test_duplicate_positions_rejected(self):
        els = [
            ElementPlacement((0, 0, 0), (0, 0, 1)),
            ElementPlacement((0, 0, 0), (0, 0, 1)),
        ]
        with pytest.raises(InvalidGeometryError):
            ArrayLayout("custom", els)


class TestBuildPi:
    def test_adjacent_distances_are_one_wavelength(self):
        lam = 0.1249
        lay = build_pi(lam, lam, (0, 0, 0))
        pos = lay.positions()
        for a, b in ((0, 1), (1, 2), (2, 3), (0, 3)):
            assert np.linalg.norm(pos[a] - pos[b]) == pytest.approx(lam, rel=1e-12)

    def test_polarization_split(self):
        lay = build_pi(0.1249, 0.1249, (0, 0, 0))
        tx_pol = (0.0, 0.0, 1.0)
        forward = (0.0, 1.0, 0.0)
        matches = [
            polarization_match(tx_pol, el.polarization, forward)
            for el in lay.elements
        ]
        assert matches[0] == pytest.approx(0.0, abs=1e-15)
        assert matches[3] == pytest.approx(0.0, abs=1e-15)
        assert matches[1] == pytest.approx(1.0, rel=1e-12)
        assert matches[2] == pytest.approx(1.0, rel=1e-12)

    def test_top_bar_above_legs(self):
        lay = build_pi(0.2, 0.1, (0, 0, 1.5))
        pos = lay.positions()
        assert pos[1][2] > pos[0][2]
        assert pos[2][2] > pos[3][2]

    def test_bad_dimensions_rejected(self):
        with pytest.raises(InvalidGeometryError):
            build_pi(0.1, -1.0, (0, 0, 0))
        with pytest.raises(InvalidGeometryError):
            build_pi(0.0, 0.1, (0, 0, 0))


class TestLosGains:
    def test_free_space_magnitude_and_path_loss(self):
        sc = Scenario.standard()
        lay = ArrayLayout("custom", (
            ElementPlacement(sc.rx_centroid, (0, 0, 1)),
            ElementPlacement(sc.rx_centroid + np.array([0, 0.5, 0]), (0, 0, 1)),
        ))
        g = los_gains(sc, lay)
        expected = sc.wavelength_m / (4.0 * math.pi * 4.5)
        assert abs(g[0]) == pytest.approx(expected, rel=1e-12)
        assert abs(g[0]) == pytest.approx(2.209e-3, abs=1e-6)
        loss = -20.0 * math.log10(abs(g[0]))
        assert loss == pytest.approx(fspl_db(4.5, sc.wavelength_m), abs=1e-9)
        assert abs(loss - 53.12) < 0.01

    def test_inverse_square_law(self):
        sc = Scenario.standard()
        near = ArrayLayout("custom", (
            ElementPlacement(sc.rx_centroid, (0, 0, 1)),
            ElementPlacement(sc.rx_centroid + np.array([0, 1.0, 0]), (0, 0, 1)),
        ))
        g = los_gains(sc, near)
        # distances 4.5 m and 5.5 m with equal polarization
        assert abs(g[1]) / abs(g[0]) == pytest.approx(4.5 / 5.5, rel=1e-12)
        sc2 = Scenario.standard(tx_rx_distance_m=9.0)
        far = ArrayLayout("custom", (
            ElementPlacement(sc2.rx_centroid, (0, 0, 1)),
            ElementPlacement(sc2.rx_centroid + np.array([0, 0.5, 0]), (0, 0, 1)),
        ))
        g2 = los_gains(sc2, far)
        assert abs(g2[0]) ** 2 == pytest.approx(abs(g[0]) ** 2 / 4.0, rel=1e-12)

    def test_perpendicular_polarization_is_dark_without_leakage(self):
        sc = Scenario.standard()
        lay = build_pi(sc.wavelength_m, sc.wavelength_m, sc.rx_centroid)
        g = los_gains(sc, lay, leakage=0.0)
        assert g[0] == 0.0 and g[3] == 0.0
        assert abs(g[1]) > 0.0 and abs(g[2]) > 0.0

    def test_leakage_floor(self):
        sc = Scenario.standard()
        lay = build_pi(sc.wavelength_m, sc.wavelength_m, sc.rx_centroid)
        g = los_gains(sc, lay, leakage=0.05)
        d1 = np.linalg.norm(lay.positions()[0] - sc.tx_position)
        expected = 0.05 * sc.wavelength_m / (4.0 * math.pi * d1)
        assert abs(g[0]) == pytest.approx(expected, rel=1e-12)

    def test_equal_distance_equal_polarization_symmetry(self):
        sc = Scenario.standard()
        lay = build_ula(sc.wavelength_m / 2.0, sc.rx_centroid)
        g = los_gains(sc, lay)
        assert abs(g[0]) == pytest.approx(abs(g[3]), rel=1e-12)
        assert abs(g[1]) == pytest.approx(abs(g[2]), rel=1e-12)

    def test_one_wavelength_shift_preserves_phase(self):
        sc = Scenario.standard()
        lam = sc.wavelength_m
        base = sc.rx_centroid
        lay = ArrayLayout("custom", (
            ElementPlacement(base, (0, 0, 1)),
            ElementPlacement(base + np.array([0, lam, 0]), (0, 0, 1)),
        ))
        g = los_gains(sc, lay)
        phase_delta = np.angle(g[1] * np.conj(g[0]))
        assert abs(phase_delta) < 1e-9

    def test_polarization_continuity(self):
        sc = Scenario.standard()
        prev = 1.0
        for theta in np.linspace(0.0, math.pi / 2.0, 10):
            pol = (math.sin(theta), 0.0, math.cos(theta))
            m = polarization_match(sc.tx_polarization, pol, (0, 1, 0))
            assert m == pytest.approx(abs(math.cos(theta)), abs=1e-12)
            assert m <= prev + 1e-12
            prev = m


class TestReplicaGains:
    def make_desk_case(self):
        # Reflection off the y = 0 wall; element placed so the image path
        # is exactly 3.75 + 2.25 = 6.0 m.
        sc = Scenario.standard()
        lay = ArrayLayout("custom", (
            ElementPlacement((4.5, 2.25, 1.5), (0, 0, 1)),
            ElementPlacement((4.5, 2.35, 1.5), (0, 0, 1)),
        ))
        return sc, lay

    def test_image_path_length_and_scale(self):
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", wall="-y", amplitude_scale=0.5)
        g = replica_gains(sc, lay, ray)
        expected = 0.5 * sc.wavelength_m / (4.0 * math.pi * 6.0)
        assert abs(g[0]) == pytest.approx(expected, rel=1e-12)

    def test_blocked_element_is_exactly_zero(self):
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", wall="-y", blocked_elements={2})
        g = replica_gains(sc, lay, ray)
        assert g[1] == 0.0
        assert abs(g[0]) > 0.0

    def test_all_blocked_gives_zero_vector(self):
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", wall="-y", blocked_elements={1, 2})
        g = replica_gains(sc, lay, ray)
        assert np.all(g == 0.0)

    def test_zero_amplitude_scale_gives_zero_vector(self):
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", wall="-y", amplitude_scale=0.0)
        assert np.all(replica_gains(sc, lay, ray) == 0.0)

    def test_replica_polarization_selects_elements(self):
        sc = Scenario.standard(link_offset_x_m=-2.7)
        lay = build_pi(sc.wavelength_m, sc.wavelength_m, sc.rx_centroid)
        ray = RayPath(kind="replica", wall="-x", polarization=(1.0, 0.0, 0.0))
        g = replica_gains(sc, lay, ray)
        # x-polarized field couples to the bar-oriented legs only
        assert abs(g[0]) > 0 and abs(g[3]) > 0
        assert g[1] == 0.0 and g[2] == 0.0

    def test_los_kind_rejected(self):
        sc, lay = self.make_desk_case()
        with pytest.raises(InvalidRayError):
            replica_gains(sc, lay, RayPath(kind="los"))

    def test_reflection_point_must_sit_on_named_wall(self):
        with pytest.raises(InvalidRayError):
            RayPath(kind="replica", wall="bogus")
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", wall="-y", reflection_point=(4.5, 1.0, 1.5))
        with pytest.raises(InvalidRayError):
            replica_gains(sc, lay, ray)

    def test_wall_inferred_from_reflection_point(self):
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", reflection_point=(4.5, 0.0, 1.5))
        g = replica_gains(sc, lay, ray)
        expected = 0.5 * sc.wavelength_m / (4.0 * math.pi * 6.0)
        assert abs(g[0]) == pytest.approx(expected, rel=1e-12)

    def test_off_wall_reflection_point_rejected(self):
        sc, lay = self.make_desk_case()
        ray = RayPath(kind="replica", reflection_point=(4.5, 5.0, 1.5))
        with pytest.raises(InvalidRayError):
            replica_gains(sc, lay, ray)

    def test_element_behind_wall_rejected(self):
        sc = Scenario.standard()
        lay = ArrayLayout("custom", (
            ElementPlacement((4.5, -1.0, 1.5), (0, 0, 1)),
            ElementPlacement((4.5, 2.35, 1.5), (0, 0, 1)),
        ))
        ray = RayPath(kind="replica", wall="-y")
        with pytest.raises(InvalidRayError):
            replica_gains(sc, lay, ray)

    def test_negative_amplitude_scale_rejected(self):
        with pytest.raises(InvalidRayError):
            RayPath(kind="replica", wall="-y", amplitude_scale=-0.1)
