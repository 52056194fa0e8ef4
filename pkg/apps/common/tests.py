import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from apps.common.conf import cptp_tolerance, get_setting, tolerance
from apps.common.exceptions import (
    DimensionMismatchError,
    InputFileError,
    SimulationError,
    UnknownConstructionError,
    diagnostic,
    format_location,
)
from apps.common.rng import SeededGenerator, as_generator


class ConfTest(SimpleTestCase):
    def test_project_settings(self):
        self.assertEqual(get_setting('FORMAT_VERSION'), 1)
        self.assertEqual(get_setting('GENERATOR'), 'numpy.random.PCG64')
        self.assertEqual(tolerance(), 1e-10)

    @override_settings(SWITCHLAB={'TOLERANCE': 1e-6})
    def test_missing_keys_fall_back_to_defaults(self):
        self.assertEqual(tolerance(), 1e-6)
        self.assertEqual(cptp_tolerance(), 1e-9)

    def test_explicit_tolerance_wins(self):
        self.assertEqual(tolerance(0.5), 0.5)

    def test_unknown_setting(self):
        with self.assertRaises(KeyError):
            get_setting('COLOUR')


class SeededGeneratorTest(SimpleTestCase):
    def test_same_seed_same_draws(self):
        np.testing.assert_array_equal(SeededGenerator(3).normal(5), SeededGenerator(3).normal(5))

    def test_spawned_streams_differ(self):
        root = SeededGenerator(3)
        self.assertFalse(np.allclose(root.spawn(0).normal(5), root.spawn(1).normal(5)))

    def test_spawn_does_not_depend_on_parent_usage(self):
        used = SeededGenerator(3)
        used.normal(100)
        np.testing.assert_array_equal(used.spawn(2).normal(4), SeededGenerator(3).spawn(2).normal(4))

    def test_path_is_equivalent_to_spawn_chain(self):
        np.testing.assert_array_equal(
            SeededGenerator(9, path=(1, 2)).uniform(size=3),
            SeededGenerator(9).spawn(1).spawn(2).uniform(size=3),
        )

    def test_as_generator(self):
        rng = SeededGenerator(1)
        self.assertIs(as_generator(rng), rng)
        self.assertEqual(as_generator(4).seed, 4)
        self.assertEqual(as_generator(None).seed, 0)


class DiagnosticTest(SimpleTestCase):
    def test_library_error(self):
        details = diagnostic(InputFileError("Fichier illisible", 'absent.json'))
        self.assertEqual(details, {'kind': 'input_file', 'location': 'absent.json', 'message': "Fichier illisible"})

    def test_validation_error_with_position(self):
        error = ValidationError(
            "Ligne %(line)s : porte inconnue %(name)s", code='unknown_gate', params={'line': 4, 'column': 6, 'name': 'FROB'},
        )
        details = diagnostic(error)
        self.assertEqual(details['kind'], 'unknown_gate')
        self.assertEqual(details['location'], 'line 4, column 6')
        self.assertEqual(details['message'], "Ligne 4 : porte inconnue FROB")

    def test_validation_error_with_field(self):
        error = ValidationError("seed invalide", code='invalid_value', params={'field': 'seed'})
        self.assertEqual(diagnostic(error)['location'], 'seed')

    def test_other_exception(self):
        self.assertEqual(diagnostic(RuntimeError('boum'))['kind'], 'RuntimeError')

    def test_error_hierarchy(self):
        self.assertIsInstance(DimensionMismatchError('x'), ValueError)
        self.assertIsInstance(UnknownConstructionError('x'), KeyError)
        self.assertEqual(str(UnknownConstructionError('construction inconnue')), 'construction inconnue')
        self.assertEqual(SimulationError('x').kind, 'simulation')

    def test_format_location(self):
        self.assertIsNone(format_location())
        self.assertEqual(format_location(2), 'line 2')
