import runpy
from pathlib import Path

import pytest

TUTORIALS = Path(__file__).resolve().parents[1] / "tutorials"


@pytest.mark.parametrize("name", ["01_lesion_radiomics.py", "02_explain_deep_features.py", "03_saliency_maps.py"])
def test_tutorial_runs(name, capsys):
    runpy.run_path(str(TUTORIALS / name), run_name="__main__")
    assert capsys.readouterr().out


def test_cli_tutorial_on_small_dataset(tmp_path, capsys):
    ns = runpy.run_path(str(TUTORIALS / "04_cli_pipeline.py"))
    ns["pipeline"](tmp_path, n=12)
    assert "CV accuracy" in capsys.readouterr().out
    assert (tmp_path / "predictions.csv").exists() and (tmp_path / "explain.json").exists()
