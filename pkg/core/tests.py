import json
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, override_settings

from core.commands import seed_value
from core.conf import DEFAULTS, get_setting
from core.exceptions import ArgumentError, InfeasibleError, ResourceError, ShiftRobustError
from core.jsonio import dumps, format_complex, load_config
from core.numerics import (
    as_generator, as_points, as_vector, ceil_count, integer_distance, lexicographic_order,
    sinc, sinc_derivative, sinpi,
)


class NumericsTests(SimpleTestCase):

    def test_sinc_values(self):
        self.assertEqual(sinc(0.0), 1.0)
        self.assertEqual(sinc(1.0), 0.0)
        self.assertAlmostEqual(sinc(0.5), 2 / math.pi, places=15)
        np.testing.assert_allclose(sinc(np.array([1e-6, -1e-6])), 1.0, rtol=1e-11)

    def test_sinc_series_branch_is_continuous(self):
        x = np.array([0.99e-4, 1.01e-4]) / math.pi
        values = sinc(x)
        self.assertAlmostEqual(values[0], values[1], places=9)

    def test_sinc_derivative_matches_difference(self):
        h = 1e-6
        for x in (0.0, 1e-5, 0.3, 1.7, -2.4):
            numeric = (sinc(x + h) - sinc(x - h)) / (2 * h)
            self.assertAlmostEqual(sinc_derivative(x), numeric, places=6)

    def test_sinpi_is_zero_at_integers(self):
        np.testing.assert_array_equal(sinpi(np.arange(-5.0, 6.0)), 0.0)
        self.assertAlmostEqual(sinpi(2.5), 1.0)

    def test_integer_distance(self):
        np.testing.assert_allclose(integer_distance([0.2, 0.8, -1.3, 2.0]), [0.2, 0.2, 0.3, 0.0])

    def test_ceil_count(self):
        self.assertEqual(ceil_count(10000.000000001), 10000)
        self.assertEqual(ceil_count(10000.5), 10001)
        self.assertEqual(ceil_count(0.0), 0)
        with self.assertRaises(ArgumentError):
            ceil_count(math.inf)

    def test_generator_passthrough(self):
        rng = np.random.default_rng(3)
        self.assertIs(as_generator(rng), rng)
        self.assertEqual(as_generator(5).integers(1 << 30), np.random.default_rng(5).integers(1 << 30))

    def test_point_shapes(self):
        self.assertEqual(as_points([1.0, 2.0, 3.0]).shape, (3, 1))
        self.assertEqual(as_points([1.0, 2.0], 2).shape, (1, 2))
        self.assertEqual(as_points(4.0).shape, (1, 1))
        with self.assertRaises(ArgumentError):
            as_points([[1.0, 2.0]], 3)
        with self.assertRaises(ArgumentError):
            as_vector([1.0], 2)

    def test_lexicographic_order(self):
        points = np.array([[1.0, 0.0], [0.0, 2.0], [0.0, -1.0]])
        self.assertEqual(lexicographic_order(points).tolist(), [2, 1, 0])


class ExceptionTests(SimpleTestCase):

    def test_exit_codes(self):
        self.assertEqual(ArgumentError('x').exit_code, 1)
        self.assertEqual(ResourceError('x').exit_code, 2)
        self.assertEqual(InfeasibleError('x').exit_code, 2)

    def test_hint_in_message(self):
        error = ResourceError('cover too large', required=12, hint='raise the resolution')
        self.assertEqual(str(error), 'cover too large (hint: raise the resolution)')
        self.assertEqual(error.required, 12)
        self.assertIsInstance(error, ShiftRobustError)

    def test_argument_error_is_value_error(self):
        self.assertIsInstance(ArgumentError('x'), ValueError)


class JsonTests(SimpleTestCase):

    def test_complex_format(self):
        self.assertEqual(format_complex(1 + 0j), '1+0i')
        self.assertEqual(format_complex(complex(0.25, -0.5)), '0.25-0.5i')
        self.assertEqual(format_complex(complex(-0.0, -0.0)), '0+0i')

    def test_dumps_handles_numpy(self):
        payload = {'b': np.float64(0.5), 'a': np.arange(3), 'c': np.bool_(True), 'z': 1j}
        decoded = json.loads(dumps(payload))
        self.assertEqual(decoded, {'a': [0, 1, 2], 'b': 0.5, 'c': True, 'z': {'re': 0.0, 'im': 1.0}})
        self.assertEqual(dumps(payload), dumps(dict(reversed(payload.items()))))

    def test_load_config(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = Path(tmp) / 'good.json'
            good.write_text(json.dumps({'version': 1, 'alpha': 0.1}))
            self.assertEqual(load_config(good)['alpha'], 0.1)

            for name, text in (
                ('old.json', json.dumps({'version': 2})),
                ('list.json', '[1, 2]'),
                ('broken.json', '{"version": 1,'),
            ):
                path = Path(tmp) / name
                path.write_text(text)
                with self.assertRaises(ArgumentError, msg=name):
                    load_config(path)
            with self.assertRaises(ArgumentError):
                load_config(Path(tmp) / 'missing.json')


class SettingsTests(SimpleTestCase):

    def test_defaults(self):
        self.assertEqual(get_setting('BUDGET_CONSTANT_C'), DEFAULTS['BUDGET_CONSTANT_C'])
        with self.assertRaises(KeyError):
            get_setting('NOT_A_SETTING')

    @override_settings(SHIFTROBUST={'COVER_SIZE_CAP': 99})
    def test_override(self):
        self.assertEqual(get_setting('COVER_SIZE_CAP'), 99)
        self.assertEqual(get_setting('MAX_ATOMS'), DEFAULTS['MAX_ATOMS'])

    def test_seed_value(self):
        self.assertEqual(seed_value('18446744073709551615'), 2**64 - 1)
        with self.assertRaises(ValueError):
            seed_value('18446744073709551616')
        with self.assertRaises(ValueError):
            seed_value('-1')
