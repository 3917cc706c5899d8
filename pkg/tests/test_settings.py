import os
import tempfile
import unittest

from core.reports import SuiteCase, VerifyReport, dump_json
from core.settings import load_settings


class TestSettings(unittest.TestCase):
    def test_defaults(self):
        settings = load_settings(environ={})
        self.assertEqual(settings.u_max_k, 4)
        self.assertEqual(settings.g_max_k, 6)
        self.assertEqual(settings.max_dimension, 24)
        self.assertGreaterEqual(settings.threads, 1)

    def test_environment_overrides(self):
        settings = load_settings(environ={"UNIQCUBE_THREADS": "3", "UNIQCUBE_MAX_NODES": "77"})
        self.assertEqual((settings.threads, settings.max_nodes), (3, 77))

    def test_canonical_budget_override(self):
        self.assertEqual(load_settings(environ={}).canonical_max_k, 6)
        self.assertEqual(load_settings(environ={"UNIQCUBE_CANONICAL_MAX_K": "7"}).canonical_max_k, 7)

    def test_yaml_file_then_environment(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "uniqcube.yaml")
            with open(path, "w", encoding="utf-8") as f:
                f.write("u_max_k: 3\nthreads: 2\n")
            settings = load_settings(environ={"UNIQCUBE_CONFIG": path, "UNIQCUBE_THREADS": "5"})
        self.assertEqual((settings.u_max_k, settings.threads), (3, 5))

    def test_invalid_values(self):
        with self.assertRaises(ValueError):
            load_settings(environ={"UNIQCUBE_THREADS": "0"})
        with self.assertRaises(ValueError):
            load_settings(config_path="/nonexistent/uniqcube.yaml", environ={})


class TestReports(unittest.TestCase):
    def test_json_is_sorted_and_stable(self):
        report = VerifyReport(suite="polygon", k_min=3, k_max=3, failures=0, skipped=0,
                              cases=[SuiteCase(name="symmetry", k=3, status="pass")])
        text = dump_json(report)
        self.assertEqual(text, dump_json(report))
        self.assertLess(text.index('"cases"'), text.index('"suite"'))


if __name__ == "__main__":
    unittest.main()
