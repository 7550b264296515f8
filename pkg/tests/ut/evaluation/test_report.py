import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

import pandas as pd

from coseq.evaluation import ChartSpec, read_table, report
from coseq.evaluation.report import write_chart
from coseq.exceptions import ConfigurationError
from tests.base_test_case import BaseTestCase


def _tables() -> dict:
    sweep = pd.DataFrame(
        {
            "setting": ["fixed@2", "fixed@5", "cosed"],
            "eval_tv": [21.5, 19.25, 22.125],
            "eval_vv": [80.0, 86.5, 84.75],
        }
    )
    usage = pd.DataFrame({"offset": [1, 2, 3], "count": [40, 12, 3]})
    return {"latent_sweep": sweep, "step_usage": usage}


CHARTS = {
    "latent_sweep": ChartSpec("latent_sweep", "scatter", "eval_vv", "eval_tv", label="setting"),
    "step_usage": ChartSpec("step_usage", "bar", "offset", "count", title="Selected steps"),
}


class TestReport(BaseTestCase):
    def test_csv_round_trips(self):
        tables = _tables()
        with tempfile.TemporaryDirectory() as temp_dir:
            report(tables, temp_dir)
            for name, table in tables.items():
                with self.subTest(table=name):
                    pd.testing.assert_frame_equal(read_table(Path(temp_dir) / f"{name}.csv"), table)

    def test_svg_is_well_formed(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            written = report(_tables(), temp_dir, CHARTS)
            svgs = [path for path in written if path.suffix == ".svg"]
            self.assertEqual(len(svgs), 2)
            for path in svgs:
                with self.subTest(chart=path.name):
                    self.assertTrue(ET.parse(path).getroot().tag.endswith("svg"))

    def test_regenerating_gives_identical_bytes(self):
        outputs = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as temp_dir:
                written = report(_tables(), temp_dir, CHARTS)
                outputs.append({path.name: path.read_bytes() for path in written})
        self.assertEqual(outputs[0], outputs[1])

    def test_unknown_chart_kind(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            with self.assertRaises(ConfigurationError):
                write_chart(_tables()["step_usage"], ChartSpec("step_usage", "pie", "offset", "count"), Path(temp_dir) / "x.svg")
