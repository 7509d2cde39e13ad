import csv
import io
import json
import tempfile
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings, tag

from cli.services.experiments import (
    PUBLISHED_TRIAL_TABLES,
    TrialGenerator,
    published_trial_error,
    strata_scaling,
    strata_slopes,
    trial_integral,
)
from cli.utils import format_value, read_csv_array, rows_to_csv
from common.exceptions import ConfigurationError
from finance.tables import COLUMNS
from lds.direction_numbers import EMBEDDED_TABLE
from lds.sobol import SobolStream
from spheremap.mapping import SpacePoints, lift_to_space
from wce.closed_forms import rms_wce_iid, wce_nakagami
from wce.kernels import KernelParams


def run(*args):
    out = io.StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


def csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


def csv_values(text):
    """Numeric body of a point CSV, below its header."""
    return np.array(csv_rows(text)[1:], dtype=float)


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def path(self, name):
        return str(Path(self.tmp.name) / name)

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            run(*args)
        self.assertEqual(ctx.exception.returncode, code)


class CsvUtilsTests(SimpleTestCase):
    def test_format_value(self):
        self.assertEqual(format_value(0.1), "0.10000000000000001")
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(7), "7")
        self.assertEqual(float(format_value(np.float64(1 / 3))), 1 / 3)

    def test_header_is_union_of_keys(self):
        text = rows_to_csv([{"N": 1, "a": 0.5}, {"N": 2, "a": 0.25, "b": 1.0}])
        self.assertEqual(csv_rows(text), [["N", "a", "b"], ["1", "0.5", ""], ["2", "0.25", "1"]])

    def test_read_skips_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "pts.csv"
            path.write_text("x,y\n1,2\n3,4\n")
            np.testing.assert_array_equal(read_csv_array(path), [[1, 2], [3, 4]])

    def test_read_errors(self):
        with tempfile.TemporaryDirectory() as tmp:
            missing = Path(tmp) / "missing.csv"
            with self.assertRaises(ConfigurationError):
                read_csv_array(missing)
            ragged = Path(tmp) / "ragged.csv"
            ragged.write_text("1,2\n3\n")
            with self.assertRaises(ConfigurationError):
                read_csv_array(ragged)
            empty = Path(tmp) / "empty.csv"
            empty.write_text("x,y\n")
            with self.assertRaises(ConfigurationError):
                read_csv_array(empty)


class PointsCommandTests(CommandTestCase):
    def test_sphere_points_shape(self):
        rows = csv_rows(run("points", "--dim=3", "--n=8", "--gen=sphere", "--seed=1"))
        self.assertEqual(rows[0], ["x1", "x2", "x3"])
        self.assertEqual(len(rows), 9)
        self.assertTrue(all(len(row) == 3 for row in rows))

    def test_headers(self):
        first = run("points", "--dim=3", "--n=4", "--gen=sobol").splitlines()[0]
        self.assertEqual(first, "x1,x2,x3")
        first = run("points", "--dim=3", "--n=4", "--polar").splitlines()[0]
        self.assertEqual(first, "radius,y1,y2,y3")
        first = run("sphere_map", "--dim=4", "--n=2").splitlines()[0]
        self.assertEqual(first, "x1,x2,x3,x4")

    def test_deterministic_given_seed(self):
        args = ("points", "--dim=4", "--n=16", "--gen=sphere", "--seed=5")
        self.assertEqual(run(*args), run(*args))
        self.assertNotEqual(run(*args), run("points", "--dim=4", "--n=16", "--gen=sphere", "--seed=6"))

    def test_generators(self):
        cube = csv_values(run("points", "--dim=2", "--n=4", "--gen=sobol", "--no-scramble"))
        np.testing.assert_array_equal(cube, [[0.5, 0.5], [0.75, 0.25], [0.25, 0.75], [0.375, 0.375]])

        normal = csv_values(run("points", "--dim=2", "--n=4", "--gen=normal", "--no-scramble"))
        np.testing.assert_allclose(normal[0], [0.0, 0.0], atol=1e-15)
        self.assertGreater(normal[1, 0], 0)
        self.assertLess(normal[1, 1], 0)

        random = csv_values(run("points", "--dim=5", "--n=32", "--gen=random"))
        self.assertEqual(random.shape, (32, 5))
        self.assertTrue(np.all((random >= 0) & (random < 1)))

    def test_polar_columns(self):
        polar = csv_values(run("points", "--dim=3", "--n=8", "--polar"))
        cartesian = csv_values(run("points", "--dim=3", "--n=8"))
        self.assertEqual(polar.shape, (8, 4))
        np.testing.assert_allclose(polar[:, 0, None] * polar[:, 1:], cartesian, atol=1e-14)

    def test_json_output_to_file(self):
        output = self.path("pts.json")
        self.assertEqual(run("points", "--dim=3", "--n=4", "--format=json", f"--output={output}"), "")
        self.assertEqual(np.array(json.loads(Path(output).read_text())).shape, (4, 3))

    def test_invalid_options(self):
        self.assertExitCode(2, "points", "--dim=1", "--n=4", "--gen=sphere")
        self.assertExitCode(2, "points", "--dim=66", "--n=4", "--gen=sobol")
        self.assertExitCode(2, "points", "--dim=3", "--n=4", "--gen=sobol", "--polar")

    def test_exhausted_stream_is_numeric_error(self):
        self.assertExitCode(3, "points", "--dim=2", f"--n={2**31}", "--gen=sobol", "--no-scramble")


class DirectionFileTests(CommandTestCase):
    def write_dirfile(self, dimensions):
        lines = EMBEDDED_TABLE.splitlines()[: dimensions]
        path = self.path("dirs.txt")
        Path(path).write_text("\n".join(lines) + "\n")
        return path

    def test_file_matches_embedded_table(self):
        path = self.write_dirfile(3)
        args = ("points", "--dim=3", "--n=16", "--gen=sobol")
        self.assertEqual(run(*args, f"--dirfile={path}"), run(*args))

    def test_file_limits_dimension(self):
        path = self.write_dirfile(2)
        self.assertExitCode(2, "points", "--dim=3", "--n=4", "--gen=sobol", f"--dirfile={path}")

    def test_setting_fallback(self):
        path = self.write_dirfile(2)
        with override_settings(SPHERECONE_DIRFILE=path):
            self.assertExitCode(2, "points", "--dim=3", "--n=4", "--gen=sobol")
            self.assertEqual(len(csv_values(run("points", "--dim=2", "--n=4", "--gen=sobol"))), 4)

    def test_missing_file(self):
        self.assertExitCode(2, "points", "--dim=2", "--n=4", f"--dirfile={self.path('nope.txt')}")


class SphereMapCommandTests(CommandTestCase):
    def test_generated_points_are_unit(self):
        points = csv_values(run("sphere_map", "--dim=4", "--n=16"))
        self.assertEqual(points.shape, (16, 4))
        np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-14)

    def test_input_file(self):
        path = self.path("cube.csv")
        Path(path).write_text("u,v\n0.25,0.5\n0.5,0.25\n")
        points = csv_values(run("sphere_map", f"--input={path}"))
        np.testing.assert_allclose(points[0], [0.0, 1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(points[1], [-np.sqrt(0.75), 0.0, 0.5], atol=1e-15)

    def test_cube_domain(self):
        path = self.path("cube.csv")
        Path(path).write_text("0.5,1.0\n")
        self.assertExitCode(2, "sphere_map", f"--input={path}")
        self.assertExitCode(2, "sphere_map", "--dim=3")


class WceCommandTests(CommandTestCase):
    p = KernelParams(mu=1.0, A=1.0, B=2.0, d=2)

    def in_memory(self, n, seed):
        cube = SobolStream(3, seed=seed, scramble=True).take(n)
        return SpacePoints.from_cartesian(lift_to_space(cube).cartesian())

    def test_round_trip(self):
        path = self.path("pts.csv")
        run("points", "--dim=3", "--n=32", "--seed=1", f"--output={path}")
        report = json.loads(run("wce", f"--input={path}", "--mu=1", "--A=1", "--B=2"))
        expected = wce_nakagami(self.p, self.in_memory(32, 1))
        self.assertAlmostEqual(report["wce"], expected.wce, delta=1e-12)
        self.assertAlmostEqual(report["wce_squared"], expected.squared, delta=1e-12)
        self.assertAlmostEqual(report["W_K"], expected.W_K, delta=1e-12)
        self.assertEqual(report["n_points"], 32)
        self.assertEqual(
            set(report), {"wce", "wce_squared", "double_sum_term", "single_sum_term", "W_K", "n_points"}
        )

    def test_polar_round_trip(self):
        polar = self.path("polar.csv")
        cartesian = self.path("cartesian.csv")
        run("points", "--dim=3", "--n=16", "--seed=2", "--polar", f"--output={polar}")
        run("points", "--dim=3", "--n=16", "--seed=2", f"--output={cartesian}")
        kernel = ("--mu=1", "--A=1", "--B=2")
        from_polar = json.loads(run("wce", f"--input={polar}", "--polar", *kernel))
        from_cartesian = json.loads(run("wce", f"--input={cartesian}", *kernel))
        self.assertAlmostEqual(from_polar["wce"], from_cartesian["wce"], delta=1e-12)

    def test_csv_format(self):
        path = self.path("pts.csv")
        run("points", "--dim=3", "--n=8", f"--output={path}")
        rows = csv_rows(run("wce", f"--input={path}", "--mu=1", "--A=1", "--B=2", "--format=csv"))
        self.assertEqual(rows[0][0], "wce")
        self.assertEqual(len(rows), 2)

    def test_bad_kernel(self):
        path = self.path("pts.csv")
        run("points", "--dim=3", "--n=8", f"--output={path}")
        self.assertExitCode(2, "wce", f"--input={path}", "--mu=1", "--A=2", "--B=1")
        self.assertExitCode(2, "wce", f"--input={self.path('none.csv')}", "--mu=1", "--A=1", "--B=2")


class RmsWceCommandTests(CommandTestCase):
    def test_iid_constant(self):
        rows = csv_rows(run("rms_wce", "--dim=3", "--n=10", "--mu=1", "--A=1", "--B=2"))
        row = dict(zip(*rows))
        constant = rms_wce_iid(KernelParams(mu=1.0, A=1.0, B=2.0, d=2))
        self.assertAlmostEqual(float(row["iid_constant"]), constant, delta=1e-15)
        self.assertAlmostEqual(float(row["iid_expected_wce_sq"]), constant / 10, delta=1e-15)

    def test_input_points(self):
        path = self.path("pts.csv")
        run("points", "--dim=3", "--n=16", f"--output={path}")
        result = json.loads(
            run("rms_wce", f"--input={path}", "--mu=2", "--A=1", "--B=3", "--format=json")
        )
        self.assertEqual(result["n"], 16)
        self.assertEqual(result["dim"], 3)
        self.assertGreater(result["fixed_directions_expected_wce_sq"], 0)
        self.assertGreater(result["permutation_expected_wce_sq"], 0)

    def test_dimension_mismatch(self):
        path = self.path("pts.csv")
        run("points", "--dim=3", "--n=4", f"--output={path}")
        self.assertExitCode(2, "rms_wce", f"--input={path}", "--dim=4", "--mu=1", "--A=1", "--B=2")
        self.assertExitCode(2, "rms_wce", "--mu=1", "--A=1", "--B=2")


class LambdaCommandTests(CommandTestCase):
    def test_prints_value(self):
        self.assertAlmostEqual(float(run("lambda", "--mu=1", "--c=2", "--K=2")), 0.625, delta=1e-14)

    def test_json(self):
        result = json.loads(run("lambda", "--mu=1", "--c=2", "--K=2", "--format=json"))
        self.assertEqual(result["K"], 2)
        self.assertAlmostEqual(result["lambda"], 0.625, delta=1e-14)
        self.assertIn("residual", result)

    def test_invalid(self):
        self.assertExitCode(2, "lambda", "--mu=1", "--c=0.5", "--K=2")
        self.assertExitCode(2, "lambda", "--mu=0", "--c=2", "--K=2")
        self.assertExitCode(2, "lambda", "--mu=1", "--c=2", "--K=0")


class TrialIntegralCommandTests(CommandTestCase):
    def test_rows(self):
        rows = list(csv.DictReader(io.StringIO(run("trial_integral", "--dim=4", "--N", "256", "1024"))))
        self.assertEqual([int(row["N"]) for row in rows], [256, 1024])
        for row in rows:
            self.assertEqual(row["generator"], TrialGenerator.INVERSE_BETA)
            self.assertLess(float(row["error"]), 0.2)
            self.assertEqual(row["published"], "")

    def test_every_generator(self):
        for generator in TrialGenerator.values:
            result = json.loads(
                run("trial_integral", "--dim=3", "--N", "512", f"--gen={generator}", "--format=json")
            )
            self.assertLess(result[0]["error"], 0.5)

    def test_published_column(self):
        self.assertEqual(published_trial_error(16, 1024, TrialGenerator.INVERSE_BETA), 1.95e-2)
        self.assertEqual(published_trial_error(64, 65536, TrialGenerator.RANDOM), 3.56e-4)
        self.assertIsNone(published_trial_error(8, 1024, TrialGenerator.RANDOM))

    def test_dimension_range(self):
        self.assertExitCode(2, "trial_integral", "--dim=1", "--N", "16")

    @tag("slow")
    def test_inverse_beta_errors_track_published_values(self):
        sizes = sorted(PUBLISHED_TRIAL_TABLES[16])
        rows = trial_integral(16, sizes, TrialGenerator.INVERSE_BETA, seed=20240101)
        for row in rows:
            self.assertIsNotNone(row["published"])
            self.assertLessEqual(row["error"], 5 * row["published"], row["N"])


class StrataCommandTests(CommandTestCase):
    def test_small_study(self):
        result = json.loads(
            run(
                "strata", "--mu=1", "--A=1", "--B=2", "--M", "4", "16",
                "--draws=5", "--empirical-max-n=16", "--format=json",
            )
        )
        first, second = result["rows"]
        self.assertEqual((first["M"], first["K"], first["N"]), (4, 2, 8))
        self.assertEqual((second["M"], second["K"], second["N"]), (16, 4, 64))
        self.assertIsNotNone(first["empirical"])
        self.assertIsNone(second["empirical"])
        self.assertLess(second["predicted"], first["predicted"])
        self.assertLess(second["predicted"], second["iid"])
        self.assertIn("predicted", result["slopes"])
        self.assertNotIn("empirical", result["slopes"])

    def test_slopes_skip_missing(self):
        rows = [
            {"N": 10, "predicted": 1e-2, "empirical": None, "iid": 1e-1, "iid_empirical": None},
            {"N": 100, "predicted": 1e-4, "empirical": None, "iid": 1e-2, "iid_empirical": None},
        ]
        slopes = strata_slopes(rows)
        self.assertAlmostEqual(slopes["predicted"], -2.0, places=12)
        self.assertAlmostEqual(slopes["iid"], -1.0, places=12)
        self.assertEqual(set(slopes), {"predicted", "iid"})

    @tag("slow")
    def test_scaling_exponents(self):
        p = KernelParams(mu=1.5, A=1.5, B=3.0, d=2)
        rows, slopes = strata_scaling(p, [64, 256, 1024, 4096], seed=21, empirical_max_n=512, draws=100)
        self.assertEqual([row["N"] for row in rows], [512, 4096, 32768, 262144])
        self.assertAlmostEqual(slopes["predicted"], -4.0 / 3.0, delta=0.15)
        self.assertAlmostEqual(slopes["iid"], -1.0, delta=0.1)
        first = rows[0]
        self.assertTrue(0.7 <= first["empirical"] / first["predicted"] <= 1.3)
        self.assertLess(first["empirical"], first["iid_empirical"])


class PriceCommandTests(CommandTestCase):
    def test_price_row(self):
        rows = list(
            csv.DictReader(
                io.StringIO(
                    run(
                        "price", "--N=256", "--reps=4", "--gen=sobol",
                        "--construction=pca", "--steps=8",
                    )
                )
            )
        )
        self.assertEqual(len(rows), 1)
        row = rows[0]
        self.assertEqual(row["kind"], "asian")
        self.assertEqual(int(row["n_points"]), 64)
        self.assertEqual(int(row["n_replicates"]), 4)
        self.assertTrue(3.0 < float(row["mean"]) < 9.0)
        self.assertAlmostEqual(
            float(row["std_error"]), float(row["std_dev_across_replicates"]) / 2.0, delta=1e-15
        )

    def test_barrier_default(self):
        result = json.loads(
            run("price", "--kind=barrier", "--N=64", "--reps=2", "--gen=mc", "--steps=4", "--format=json")
        )
        self.assertEqual(result["kind"], "barrier")
        self.assertGreaterEqual(result["mean"], 0.0)

    def test_invalid_split(self):
        self.assertExitCode(2, "price", "--N=100", "--reps=8")
        self.assertExitCode(2, "price", "--N=96", "--reps=2", "--gen=sobol")
        self.assertExitCode(2, "price", "--N=64", "--reps=2", "--gen=sphere", "--steps=1")
        self.assertExitCode(2, "price", "--kind=barrier", "--barrier=90", "--N=64", "--reps=2")


class TableCommandTests(CommandTestCase):
    def test_small_table(self):
        rows = list(
            csv.DictReader(io.StringIO(run("table", "--N", "64", "128", "--reps=4", "--steps=4")))
        )
        self.assertEqual([int(row["N"]) for row in rows], [64, 128])
        for row in rows:
            for label in COLUMNS:
                self.assertGreaterEqual(float(row[label]), 0.0)

    def test_rejects_sizes(self):
        self.assertExitCode(2, "table", "--N", "300", "--reps=4")
