import os

import numpy as np
import pytest

from hyplyap_figures import FigureSpec, SchemaMismatch, make_figures
from hyplyap_figures.cli import main
from hyplyap_figures.figures import read_table

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

FIXTURE_BY_KIND = {
    "mu-scatter": "cy_table.csv",
    "line-scan": "line_scan.csv",
    "n2-heatmap": "n2_grid.csv",
    "weight2-surface": "weight2.csv",
}


def fixture(name):
    return os.path.join(FIXTURES, name)


class TestRendering:
    @pytest.mark.parametrize("kind", sorted(FIXTURE_BY_KIND))
    def test_renders_without_error(self, kind, tmp_path):
        out = tmp_path / f"{kind}.png"
        got = make_figures(FigureSpec(kind, fixture(FIXTURE_BY_KIND[kind]), str(out)))
        assert got == str(out)
        assert out.stat().st_size > 4000

    @pytest.mark.parametrize("kind", sorted(FIXTURE_BY_KIND))
    def test_byte_identical_rerun(self, kind, tmp_path):
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        src = fixture(FIXTURE_BY_KIND[kind])
        make_figures(FigureSpec(kind, src, str(a)))
        make_figures(FigureSpec(kind, src, str(b)))
        assert a.read_bytes() == b.read_bytes()

    def test_good_bad_split_in_cy_fixture(self):
        table = read_table(fixture("cy_table.csv"), "mu-scatter")
        good = np.abs(table["gap"]) <= 3.0 * table["stderr_sum"]
        assert int(good.sum()) == 7
        assert int((~good).sum()) == 7

    def test_zone3_only_grid_is_flat(self, tmp_path):
        table = read_table(fixture("n2_zone3_only.csv"), "n2-heatmap")
        assert np.allclose(table["lambda_1"], 0.0)
        out = tmp_path / "flat.png"
        make_figures(FigureSpec("n2-heatmap", fixture("n2_zone3_only.csv"), str(out)))
        assert out.exists()

    def test_weight2_collapse_data(self):
        table = read_table(fixture("weight2.csv"), "weight2-surface")
        for key in np.unique(table["x_plus_y"]):
            group = table["delta"][table["x_plus_y"] == key]
            spread = group.max() - group.min()
            assert spread <= 3.0 * np.hypot(0.004, 0.004)


class TestSchema:
    def test_missing_column_is_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("mu1,mu2,gap\n0.1,0.2,0.0\n")
        with pytest.raises(SchemaMismatch, match="stderr_sum"):
            make_figures(FigureSpec("mu-scatter", str(bad), str(tmp_path / "x.png")))

    def test_unknown_column_warns(self, tmp_path):
        extra = tmp_path / "extra.csv"
        extra.write_text(
            "r,x,lambda_1,zone,surprise\n0.1,0.2,0.3,5,1\n0.2,0.3,0.1,1,2\n")
        with pytest.warns(UserWarning, match="surprise"):
            read_table(str(extra), "n2-heatmap")

    def test_empty_table_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("mu1,mu2,gap,stderr_sum\n")
        with pytest.raises(SchemaMismatch, match="no data rows"):
            read_table(str(empty), "mu-scatter")

    def test_non_numeric_rejected(self, tmp_path):
        bad = tmp_path / "nan.csv"
        bad.write_text("mu1,mu2,gap,stderr_sum\na,0.2,0.0,0.001\n")
        with pytest.raises(SchemaMismatch, match="mu1"):
            read_table(str(bad), "mu-scatter")


class TestCli:
    def test_success_exit_code(self, tmp_path, capsys):
        out = tmp_path / "fig.png"
        code = main(["--kind", "mu-scatter", "--in", fixture("cy_table.csv"),
                     "--out", str(out)])
        assert code == 0
        assert str(out) in capsys.readouterr().out
        assert out.exists()

    def test_schema_mismatch_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("mu1,mu2\n0.1,0.2\n")
        code = main(["--kind", "mu-scatter", "--in", str(bad),
                     "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "schema mismatch" in capsys.readouterr().err
