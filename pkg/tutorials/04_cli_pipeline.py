"""The full command-line pipeline on a freshly generated lesion dataset.

Equivalent shell session::

    radexplain extract work/manifest.csv --config work/config.ini --out work/features.csv
    radexplain preprocess work/features.csv --out work/pre.csv --provenance work/provenance.json
    radexplain select work/pre.csv --out work/selection.json
    radexplain train work/pre.csv --selection work/selection.json --model-out work/model.json --report-out work/cv.json
    radexplain predict work/pre.csv --model work/model.json --out work/predictions.csv
    radexplain explain work/pre.csv work/deep_features.csv --out work/explain.json
    radexplain report work/explain.json

Pass a directory as the first argument to keep the outputs.
"""
import json
import sys
import tempfile
from pathlib import Path

from radexplain.cli import main
from radexplain.synthetic import write_lesion_fixture


def run(*argv):
    code = main([str(a) for a in argv])
    if code:
        sys.exit(f"radexplain {argv[0]} failed with exit code {code}")


def pipeline(work: Path, n: int = 40) -> None:
    write_lesion_fixture(work, n=n)
    cfg = ("--config", work / "config.ini")
    run("extract", work / "manifest.csv", "--out", work / "features.csv", *cfg)
    run("preprocess", work / "features.csv", "--out", work / "pre.csv", "--provenance", work / "provenance.json", *cfg)
    prov = json.loads((work / "provenance.json").read_text())
    print(f"kept {len(prov['kept'])} features, dropped {len(prov['dropped'])}")

    run("select", work / "pre.csv", "--out", work / "selection.json", *cfg)
    print("selected:", json.loads((work / "selection.json").read_text())["chosen"])
    run("train", work / "pre.csv", "--selection", work / "selection.json",
        "--model-out", work / "model.json", "--report-out", work / "cv.json", *cfg)
    cv = json.loads((work / "cv.json").read_text())
    print(f"CV accuracy {cv['mean']['accuracy']:.3f} +/- {cv['std']['accuracy']:.3f}")
    run("predict", work / "pre.csv", "--model", work / "model.json", "--out", work / "predictions.csv", *cfg)

    run("explain", work / "pre.csv", work / "deep_features.csv", "--out", work / "explain.json", *cfg)
    run("report", work / "explain.json")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        out = Path(sys.argv[1])
        out.mkdir(parents=True, exist_ok=True)
        pipeline(out)
    else:
        with tempfile.TemporaryDirectory() as tmp:
            pipeline(Path(tmp))
