"""
Unit tests for the dipole field model, superstructures and device rotation
"""
import unittest

import numpy as np
import pytest

from magsig.errors import ConfigurationError, DomainError, SingularityError
from magsig.fieldsim import (
    MU0,
    DipoleSource,
    build_superstructure,
    dipole_field,
    dipole_tensor,
    field_norm_envelope,
    rotate_world_to_device,
    superposed_field,
)


class TestDipoleField(unittest.TestCase):
    def setUp(self) -> None:
        self.unit = DipoleSource((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))
        self.rng = np.random.default_rng(7)

    def test_on_axis_closed_form(self):
        field = dipole_field(np.array([0.0, 0.0, 1.0]), self.unit)
        np.testing.assert_allclose(field, [0.0, 0.0, 0.2], atol=1e-12)

    def test_equatorial_closed_form(self):
        field = dipole_field(np.array([1.0, 0.0, 0.0]), self.unit)
        np.testing.assert_allclose(field, [0.0, 0.0, -0.1], atol=1e-12)

    def test_tensor_symmetric_and_traceless(self):
        positions = self.rng.normal(size=(50, 3)) * 3.0 + 0.5
        tensors = dipole_tensor(positions, np.zeros(3))
        scale = np.abs(tensors).max()
        np.testing.assert_allclose(tensors, np.swapaxes(tensors, -1, -2), atol=1e-12 * scale)
        np.testing.assert_allclose(np.trace(tensors, axis1=-2, axis2=-1), 0.0, atol=1e-12 * scale)

    def test_tensor_contracts_to_field(self):
        source = DipoleSource((0.3, -0.2, 1.5), (10.0, -5.0, 120.0))
        sensor = np.array([2.0, 1.0, 0.7])
        tensor = dipole_tensor(sensor, source.position_array)
        np.testing.assert_allclose(tensor @ source.moment_array * 1e6, dipole_field(sensor, source), rtol=1e-12)

    def test_inverse_cube_decay(self):
        source = DipoleSource((0.0, 0.0, 0.0), (3.0, -1.0, 2.0))
        directions = self.rng.normal(size=(20, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        near = dipole_field(directions * 1.3, source)
        far = dipole_field(directions * 2.6, source)
        np.testing.assert_allclose(far, near / 8.0, rtol=1e-9)

    def test_superposition(self):
        a = DipoleSource((0.0, 0.0, 1.5), (0.0, 0.0, 125.0))
        b = DipoleSource((3.0, 0.0, 1.5), (0.0, 0.0, 250.0))
        sensors = self.rng.normal(size=(30, 3)) + np.array([1.5, 2.0, 0.0])
        total = superposed_field(sensors, [a, b])
        np.testing.assert_allclose(total, dipole_field(sensors, a) + dipole_field(sensors, b), rtol=1e-12, atol=1e-12)

    def test_norm_within_dipole_envelope(self):
        moment = 125.0
        source = DipoleSource((0.0, 0.0, 0.0), (0.0, 0.0, moment))
        directions = self.rng.normal(size=(200, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        R = 1.7
        norms = np.linalg.norm(dipole_field(directions * R, source), axis=1)
        base = MU0 * moment / (4.0 * np.pi * R**3) * 1e6
        self.assertTrue(np.all(norms >= base * (1 - 1e-12)))
        self.assertTrue(np.all(norms <= 2.0 * base * (1 + 1e-12)))

    def test_coincident_sensor_is_singular(self):
        with self.assertRaises(SingularityError):
            dipole_field(np.zeros(3), self.unit)

    def test_zero_moment_rejected(self):
        with self.assertRaises(ConfigurationError):
            DipoleSource((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


def test_envelope_values():
    assert field_norm_envelope(125.0, 0.2, 1.0) == pytest.approx(31.42, abs=0.01)
    assert field_norm_envelope(125.0, 0.1, 0.5) == pytest.approx(125.66, abs=0.01)


def test_envelope_domain_errors():
    with pytest.raises(DomainError):
        field_norm_envelope(125.0, 0.05, 1.0)
    with pytest.raises(SingularityError):
        field_norm_envelope(125.0, 0.15, 0.0)


def test_superstructure_permutations():
    first = build_superstructure(1)
    assert first.multiplicities == (1, 2, 3)
    assert build_superstructure(6).multiplicities == (3, 2, 1)
    moments = [u.moment_norm for u in first.units]
    assert moments == pytest.approx([125.0, 250.0, 375.0])
    # Weights 1, 2, 3 at 0, 3, 6 m along the row
    assert first.magnetic_center[0] == pytest.approx(4.0)
    assert first.length == pytest.approx(6.0)


def test_all_six_permutations_distinct():
    seen = {build_superstructure(k).multiplicities for k in range(1, 7)}
    assert len(seen) == 6


@pytest.mark.parametrize("bad", [0, 7, 2.5])
def test_superstructure_id_out_of_range(bad):
    with pytest.raises(ConfigurationError):
        build_superstructure(bad)


def test_rotation_identity_and_yaw():
    v = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(rotate_world_to_device(v, 0.0, 0.0, 0.0), v, atol=1e-12)
    np.testing.assert_allclose(rotate_world_to_device(v, 180.0, 0.0, 0.0), [-1.0, -2.0, 3.0], atol=1e-12)


def test_rotation_preserves_norm():
    rng = np.random.default_rng(3)
    fields = rng.normal(size=(100, 3)) * 40.0
    yaw = rng.uniform(0, 360, 100)
    pitch = rng.uniform(-90, 90, 100)
    roll = rng.uniform(-180, 180, 100)
    rotated = rotate_world_to_device(fields, yaw, pitch, roll)
    np.testing.assert_allclose(np.linalg.norm(rotated, axis=1), np.linalg.norm(fields, axis=1), rtol=1e-12)
