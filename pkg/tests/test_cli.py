import unittest

import jsonschema
import orjson
from click.testing import CliRunner

from app import cli
from core.reports import report_schemas

ADJACENT_LEVELS_SAMPLE = "---- 3\n+--- 3\n-+-- 3\n--+- 3\n---+ 3\n"


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner(mix_stderr=False)
        self.schemas = report_schemas()

    def invoke(self, *args):
        return self.runner.invoke(cli, list(args))

    def json_report(self, result, schema_name):
        payload = orjson.loads(result.stdout)
        jsonschema.validate(payload, self.schemas[schema_name])
        return payload


class TestUniqCommand(CliTestCase):
    def test_unique_levels(self):
        result = self.invoke("uniq", "-k", "4", "-q", "2", "--levels", "0,2", "--space", "cone")
        self.assertEqual(result.exit_code, 0, result.stderr)
        report = self.json_report(result, "uniq")
        self.assertEqual(report["verdict"], "Unique")
        self.assertEqual(report["levels"], [0, 2])
        self.assertIsNone(report["witness"])

    def test_not_unique_levels(self):
        result = self.invoke("uniq", "-k", "4", "-q", "2", "--levels", "0,1", "--space", "cone")
        self.assertEqual(result.exit_code, 1)
        report = self.json_report(result, "uniq")
        self.assertEqual(report["verdict"], "NotUnique")
        self.assertTrue(report["witness_valid"])
        self.assertIn({"L": [], "num": "1", "den": "4"}, report["witness"])
        self.assertIn({"L": [1, 2], "num": "1", "den": "4"}, report["witness"])

    def test_points(self):
        result = self.invoke("uniq", "-k", "3", "-q", "1", "--points", "---,+++")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.json_report(result, "uniq")["points"], ["---", "+++"])

    def test_linear_space(self):
        result = self.invoke("uniq", "-k", "3", "-q", "1", "--points", "---,+++", "--space", "linear")
        self.assertEqual(result.exit_code, 1)
        self.assertEqual(self.json_report(result, "uniq")["method"], "rank")

    def test_base_vertex(self):
        result = self.invoke("uniq", "-k", "3", "-q", "1", "--levels", "0,3", "--base", "+-+")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(sorted(self.json_report(result, "uniq")["points"]), ["+-+", "-+-"])

    def test_coefficient_formulation(self):
        result = self.invoke("uniq", "-k", "4", "-q", "2", "--levels", "0,2", "--formulation", "coefficients")
        self.assertEqual(result.exit_code, 0)

    def test_text_output(self):
        result = self.invoke("uniq", "-k", "4", "-q", "2", "--levels", "0,1", "--format", "text")
        self.assertEqual(result.exit_code, 1)
        self.assertIn("NotUnique", result.stdout)

    def test_input_errors(self):
        cases = [
            ("-k", "3", "-q", "1", "--points", "--x"),
            ("-k", "3", "-q", "1", "--points", "--,++"),
            ("-k", "3", "-q", "1"),
            ("-k", "3", "-q", "1", "--points", "---", "--levels", "0"),
            ("-k", "3", "-q", "5", "--levels", "0"),
            ("-k", "3", "-q", "1", "--levels", "0,a"),
        ]
        for args in cases:
            with self.subTest(args=args):
                self.assertEqual(self.invoke("uniq", *args).exit_code, 2)


class TestVerifyCommand(CliTestCase):
    def test_polygon_suite(self):
        result = self.invoke("verify", "polygon", "--k", "3..20")
        self.assertEqual(result.exit_code, 0)
        report = self.json_report(result, "verify")
        self.assertEqual(report["failures"], 0)
        self.assertEqual(len(report["cases"]), 18 * 4)

    def test_level_theorem_suite(self):
        result = self.invoke("verify", "level-theorem", "--k", "3..4")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(self.json_report(result, "verify")["failures"], 0)

    def test_remarks_suite(self):
        result = self.invoke("verify", "remarks", "--k", "3..4", "--format", "text")
        self.assertEqual(result.exit_code, 0)
        self.assertIn("antipodal_unique_q1", result.stdout)

    def test_bounds_suite(self):
        result = self.invoke("verify", "bounds", "--k", "2..3")
        self.assertEqual(result.exit_code, 0)
        report = self.json_report(result, "verify")
        self.assertEqual((report["failures"], report["skipped"]), (0, 0))

    def test_bad_ranges(self):
        for args in (("polygon", "--k", "2..4"), ("polygon", "--k", "5..3"), ("remarks", "--k", "x"), ("nope",)):
            with self.subTest(args=args):
                self.assertEqual(self.invoke("verify", *args).exit_code, 2)


class TestExtremalCommand(CliTestCase):
    def test_u32(self):
        result = self.invoke("extremal", "u", "-k", "3", "-q", "2")
        self.assertEqual(result.exit_code, 0)
        report = self.json_report(result, "extremal")
        self.assertEqual(report["value"], 4)
        self.assertEqual(len(report["certificate"]), 4)

    def test_u33(self):
        result = self.invoke("extremal", "u", "-k", "3", "-q", "3")
        self.assertEqual(self.json_report(result, "extremal")["value"], 8)

    def test_g42_cross_check(self):
        result = self.invoke("extremal", "g", "-k", "4", "-q", "2")
        self.assertEqual(result.exit_code, 0)
        report = self.json_report(result, "extremal")
        self.assertEqual(report["value"], 5)
        self.assertEqual(report["cross_check"]["g2_formula"], 5)

    def test_csv(self):
        result = self.invoke("extremal", "g", "-k", "3", "-q", "1", "--format", "csv")
        lines = result.stdout.splitlines()
        self.assertEqual(lines[0], "k,q,quantity,value,method,certificate")
        self.assertTrue(lines[1].startswith("3,1,g,2,exhaustive,"))

    def test_budget(self):
        result = self.invoke("extremal", "g", "-k", "6", "-q", "3", "--budget", "10")
        self.assertEqual(result.exit_code, 3)
        report = self.json_report(result, "extremal")
        self.assertEqual(report["status"], "unknown")
        self.assertIsNone(report["value"])

    def test_bad_space(self):
        self.assertEqual(self.invoke("extremal", "u", "-k", "3", "-q", "4").exit_code, 2)


class TestPolygonCommand(CliTestCase):
    def test_csv(self):
        result = self.invoke("polygon", "-k", "4")
        self.assertEqual(result.exit_code, 0)
        lines = result.stdout.splitlines()
        self.assertEqual(lines[0], "j,x_num,x_den,y_num,y_den")
        self.assertEqual(len(lines), 6)
        self.assertEqual(lines[2], "1,2,3,1,3")

    def test_k2(self):
        lines = self.invoke("polygon", "-k", "2").stdout.splitlines()
        self.assertEqual(lines[1:], ["0,1,1,0,1", "1,0,1,1,1", "2,0,1,0,1"])

    def test_json(self):
        report = self.json_report(self.invoke("polygon", "-k", "5", "--format", "json"), "polygon")
        self.assertEqual(len(report["points"]), 6)

    def test_k1(self):
        self.assertEqual(self.invoke("polygon", "-k", "1").exit_code, 2)


class TestIsingCommand(CliTestCase):
    def test_simulate_is_reproducible(self):
        args = ("ising", "simulate", "-k", "3", "--n", "1000", "--seed", "7")
        first, second = self.invoke(*args), self.invoke(*args)
        self.assertEqual(first.exit_code, 0)
        self.assertEqual(first.stdout, second.stdout)
        self.assertEqual(sum(int(line.split()[1]) for line in first.stdout.splitlines()), 1000)

    def test_simulate_json(self):
        result = self.invoke("ising", "simulate", "-k", "2", "--n", "50", "--seed", "1", "--format", "json")
        report = self.json_report(result, "ising-simulate")
        self.assertEqual(report["n"], 50)

    def test_seed_required(self):
        self.assertEqual(self.invoke("ising", "simulate", "-k", "3", "--n", "10").exit_code, 2)
        self.assertEqual(self.invoke("ising", "curve", "-k", "3", "--n", "4").exit_code, 2)

    def test_fit_nonexistent(self):
        with self.runner.isolated_filesystem():
            with open("s.txt", "w", encoding="utf-8") as f:
                f.write(ADJACENT_LEVELS_SAMPLE)
            result = self.invoke("ising", "fit", "--sample", "s.txt", "-k", "4", "--tol", "1e-10")
        self.assertEqual(result.exit_code, 1)
        report = self.json_report(result, "ising-fit")
        self.assertEqual(report["status"], "NonExistent")
        self.assertIsNotNone(report["witness"])

    def test_fit_simulated_sample(self):
        simulated = self.invoke("ising", "simulate", "-k", "3", "--n", "2000", "--seed", "3", "--field", "0.2")
        with self.runner.isolated_filesystem():
            with open("s.txt", "w", encoding="utf-8") as f:
                f.write(simulated.stdout)
            full = self.invoke("ising", "fit", "--sample", "s.txt")
            homogeneous = self.invoke("ising", "fit", "--sample", "s.txt", "--homogeneous")
        self.assertEqual(full.exit_code, 0)
        report = self.json_report(full, "ising-fit")
        self.assertEqual(len(report["field"]), 3)
        self.assertEqual(set(report["couplings"]), {"1,2", "1,3", "2,3"})
        self.assertEqual(homogeneous.exit_code, 0)
        self.assertAlmostEqual(self.json_report(homogeneous, "ising-fit")["B"], 0.2, delta=0.1)

    def test_fit_input_errors(self):
        self.assertEqual(self.invoke("ising", "fit", "--sample", "missing.txt").exit_code, 2)
        with self.runner.isolated_filesystem():
            with open("s.txt", "w", encoding="utf-8") as f:
                f.write("--- 1\n")
            self.assertEqual(self.invoke("ising", "fit", "--sample", "s.txt", "-k", "4").exit_code, 2)

    def test_curve(self):
        args = ("ising", "curve", "-k", "3", "-q", "2", "--n", "4,8", "--reps", "100", "--seed", "1")
        first, second = self.invoke(*args), self.invoke(*args)
        self.assertEqual(first.exit_code, 0)
        self.assertEqual(first.stdout, second.stdout)
        lines = first.stdout.splitlines()
        self.assertEqual(lines[0], "n,estimate,ci_low,ci_high")
        self.assertEqual(len(lines), 3)

    def test_curve_json(self):
        result = self.invoke("ising", "curve", "-k", "3", "--n", "16", "--reps", "100", "--seed", "2",
                             "--format", "json")
        self.assertEqual(self.json_report(result, "ising-curve")["rows"][0]["n"], 16)

    def test_curve_needs_replicates(self):
        result = self.invoke("ising", "curve", "-k", "3", "--n", "4", "--reps", "5", "--seed", "1")
        self.assertEqual(result.exit_code, 2)


class TestSchemaCommand(CliTestCase):
    def test_all(self):
        result = self.invoke("schema")
        self.assertEqual(result.exit_code, 0)
        self.assertEqual(set(orjson.loads(result.stdout)), set(self.schemas))

    def test_one(self):
        payload = orjson.loads(self.invoke("schema", "extremal").stdout)
        self.assertEqual(payload["title"], "ExtremalReport")


if __name__ == "__main__":
    unittest.main()
