"""Command line driver.

Exit codes: 0 success, 2 input or validation error, 3 numeric or
degenerate-data error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import cam, tabular, xaicorr
from .config import PipelineConfig, load_config
from .errors import InputError, RadExplainError
from .imaging import crop_to_bounding_box, load_image, load_mask
from .learn import ForestModel, cv_select_best, rf_predict_proba, sfs_select
from .radiomics.extract import ExtractionConfig, extract_all, feature_names
from .tabular import FeatureMatrix

log = logging.getLogger("radexplain")


@dataclass(frozen=True)
class ManifestRow:
    sample_id: str
    image_path: Path
    mask_path: Path
    label: int | None


def read_manifest(path) -> list[ManifestRow]:
    """CSV with header ``sample_id,image_path,mask_path[,label]``.

    Relative paths resolve against the manifest's directory. Labels are
    ``benign``/``malignant`` (or 0/1); an empty label cell means unlabelled.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"{path}: manifest not found") from None
    reader = csv.DictReader(text.splitlines())
    required = {"sample_id", "image_path", "mask_path"}
    if reader.fieldnames is None or not required <= set(reader.fieldnames):
        raise InputError(f"{path}: manifest needs columns {sorted(required)}")
    rows, seen = [], set()
    for rec in reader:
        sid = rec["sample_id"].strip()
        if sid in seen:
            raise InputError(f"{path}: duplicate sample_id {sid!r}")
        seen.add(sid)
        raw_label = (rec.get("label") or "").strip().lower()
        if raw_label and raw_label not in tabular.LABEL_NAMES:
            raise InputError(f"{path}: sample {sid!r} has unknown label {raw_label!r}")
        rows.append(ManifestRow(
            sample_id=sid,
            image_path=(path.parent / rec["image_path"].strip()),
            mask_path=(path.parent / rec["mask_path"].strip()),
            label=tabular.LABEL_NAMES[raw_label] if raw_label else None,
        ))
    if not rows:
        raise InputError(f"{path}: manifest has no samples")
    return rows


def _extract_one(args) -> tuple[str, dict | None, RadExplainError | None]:
    row, cfg = args
    try:
        for p in (row.image_path, row.mask_path):
            if not p.exists():
                raise InputError(f"missing file {p}")
        image = load_image(row.image_path)
        mask = load_mask(row.mask_path)
        image, mask = crop_to_bounding_box(image, mask)
        return row.sample_id, extract_all(image, mask, cfg), None
    except RadExplainError as exc:
        return row.sample_id, None, exc


def extract_manifest(rows, cfg: ExtractionConfig, jobs: int = 1, skip_errors: bool = False) -> FeatureMatrix:
    work = [(r, cfg) for r in rows]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_extract_one, work))
    else:
        results = [_extract_one(w) for w in work]
    names = feature_names()
    ids, values, labels = [], [], []
    for row, (sid, feats, err) in zip(rows, results):
        if err is not None:
            msg = f"sample {sid}: {err}"
            if not skip_errors:
                raise type(err)(msg)
            log.warning("skipping %s", msg)
            continue
        ids.append(sid)
        values.append([feats[n] for n in names])
        labels.append(row.label)
    if not ids:
        raise InputError("no sample could be extracted")
    has_labels = all(lab is not None for lab in labels)
    return FeatureMatrix(ids, names, np.array(values), np.array(labels) if has_labels else None)


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# -- subcommands -----------------------------------------------------------

def cmd_extract(args, cfg: PipelineConfig) -> None:
    rows = read_manifest(args.manifest)
    m = extract_manifest(rows, cfg.extraction, jobs=args.jobs, skip_errors=args.skip_errors)
    tabular.write_csv(m, args.out)
    log.info("wrote %d samples x %d features to %s", m.n_samples, m.n_features, args.out)


def cmd_preprocess(args, cfg: PipelineConfig) -> None:
    m = tabular.read_csv(args.features)
    nzv = tabular.near_zero_variance_columns(m, cfg.nzv_cutoff)
    filtered = tabular.near_zero_variance_filter(m, cfg.nzv_cutoff)
    plan = tabular.correlation_prune_plan(filtered, cfg.prune_threshold)
    dropped_corr = {d for d, _ in plan}
    out = filtered.select([c for c in filtered.columns if c not in dropped_corr])
    tabular.write_csv(out, args.out)
    provenance = {
        "schema_version": 1,
        "input": Path(args.features).name,
        "nzv_cutoff": cfg.nzv_cutoff,
        "prune_threshold": cfg.prune_threshold,
        "dropped": [{"name": n, "reason": "nzv"} for n in nzv]
        + [{"name": d, "reason": f"correlated_with:{k}"} for d, k in plan],
        "kept": list(out.columns),
    }
    _write_json(args.provenance, provenance)


def _labelled(path) -> FeatureMatrix:
    m = tabular.read_csv(path)
    if m.labels is None:
        raise InputError(f"{path}: feature CSV has no label column")
    return m


def cmd_select(args, cfg: PipelineConfig) -> None:
    m = _labelled(args.features)
    report = sfs_select(m, cfg.rf, cfg.cv, k_max=cfg.sfs_k_max, patience=cfg.sfs_patience)
    _write_json(args.out, report.to_dict())
    if args.reduced:
        tabular.write_csv(m.select(report.chosen), args.reduced)


def cmd_train(args, cfg: PipelineConfig) -> None:
    m = _labelled(args.features)
    if args.selection:
        chosen = json.loads(Path(args.selection).read_text(encoding="utf-8"))["chosen"]
        m = m.select(chosen)
    model, report = cv_select_best(m, cfg.cv, cfg.rf)
    Path(args.model_out).write_text(model.to_json() + "\n", encoding="utf-8")
    doc = report.to_dict()
    doc["features"] = list(m.columns)
    doc["scheme"] = {"k": cfg.cv_k, "repeats": cfg.cv_repeats, "seed": cfg.cv_seed}
    _write_json(args.report_out, doc)
    log.info("CV accuracy %.4f +/- %.4f", report.mean["accuracy"], report.std["accuracy"])


def cmd_predict(args, cfg: PipelineConfig) -> None:
    try:
        model = ForestModel.from_json(Path(args.model).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{args.model}: model file not found") from None
    m = tabular.read_csv(args.features)
    scores = rf_predict_proba(model, m)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "score", "prediction"])
        for sid, s in zip(m.sample_ids, scores):
            w.writerow([sid, repr(float(s)), "malignant" if s >= 0.5 else "benign"])


def cmd_explain(args, cfg: PipelineConfig) -> None:
    radiomic = tabular.read_csv(args.radiomic)
    deep = tabular.read_csv(args.deep, provenance=args.deep_provenance or Path(args.deep).name)
    mode = "absolute" if args.absolute else cfg.mode
    cm = xaicorr.correlation_matrix(radiomic, deep)
    grid = xaicorr.default_trend_grid(cfg.trend_points)
    report = xaicorr.build_report(cm, cfg.thresholds, mode, grid)
    Path(args.out).write_text(xaicorr.report_json(report), encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(xaicorr.report_csv(report), encoding="utf-8")


def cmd_cam(args, cfg: PipelineConfig) -> None:
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    unknown = set(methods) - {"grad", "score", "eigen"}
    if unknown or not methods:
        raise InputError(f"unknown CAM method(s): {sorted(unknown) or methods}")
    A = cam.read_atns(args.activations)
    maps = {}
    for method in methods:
        if method == "grad":
            if not args.gradients:
                raise InputError("grad method needs --gradients")
            maps[method] = cam.grad_cam(A, cam.read_atns(args.gradients))
        elif method == "score":
            if not args.weights:
                raise InputError("score method needs --weights")
            maps[method] = cam.score_cam(A, cam.read_weights(args.weights), softmax=args.softmax)
        else:
            maps[method] = cam.eigen_cam(A)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for method, sal in maps.items():
        if args.size:
            sal = cam.upsample_bilinear(sal, *args.size)
            maps[method] = sal
        cam.export_saliency(sal, out / f"{method}.png", out / f"{method}.atns")
    if len(maps) >= 2:
        names = list(maps)
        pairs = []
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                d = cam.map_discrepancy(maps[names[i]], maps[names[j]], cfg.cam_q)
                pearson = None if np.isnan(d["pearson"]) else d["pearson"]
                pairs.append({"a": names[i], "b": names[j], "pearson": pearson,
                              "top_q_jaccard": d["top_q_jaccard"], "q": d["q"], "n_top": d["n_top"]})
        _write_json(out / "discrepancy.json", {"schema_version": 1, "pairs": pairs})


def render_report(report: dict) -> str:
    """Plain-text tables of grouped counts and the correlation trend."""
    ths = report["thresholds"]
    width = max([len("feature")] + [len(g["base"]) for g in report["grouped"]])
    lines = [f"mode: {report['mode']}   samples: {report.get('n_samples', '?')}   "
             f"deep features: {report.get('n_deep', '?')}", ""]
    lines.append("feature".ljust(width) + "".join(f"  M>={t:<5g}" for t in ths))
    for g in report["grouped"]:
        if not any(g["counts"]):
            continue
        lines.append(g["base"].ljust(width) + "".join(f"  {c:<8d}" for c in g["counts"]))
    lines += ["", "trend (M: total pairs)"]
    lines += [f"  {t['M']:.2f}: {t['total']}" for t in report["trend"][::10]]
    if report["undefined_pairs"]:
        lines += ["", f"undefined pairs (constant columns): {len(report['undefined_pairs'])}"]
    return "\n".join(lines) + "\n"


def cmd_report(args, cfg: PipelineConfig) -> None:
    try:
        report = json.loads(Path(args.explain).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{args.explain}: report not found") from None
    try:
        xaicorr.validate_report(report)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{args.explain}: report does not match schema: {exc}") from None
    text = render_report(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config file (INI key/value)")
    common.add_argument("--seed", type=int, help="override the CV and forest seeds")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for extraction")
    common.add_argument("--skip-errors", action="store_true", help="skip samples that fail extraction")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="radexplain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="radiomic features from a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("preprocess", parents=[common], help="variance and correlation filters")
    p.add_argument("features")
    p.add_argument("--out", required=True)
    p.add_argument("--provenance", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("select", parents=[common], help="sequential forward selection")
    p.add_argument("features")
    p.add_argument("--out", required=True)
    p.add_argument("--reduced", help="also write the CSV restricted to chosen features")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", parents=[common], help="repeated stratified CV, keep best fold model")
    p.add_argument("features")
    p.add_argument("--selection", help="selection JSON from 'select'")
    p.add_argument("--model-out", required=True)
    p.add_argument("--report-out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="score samples with a trained model")
    p.add_argument("features")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("explain", parents=[common], help="correlate deep with radiomic features")
    p.add_argument("radiomic")
    p.add_argument("deep")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--absolute", action="store_true", help="count |rho| >= M instead of rho >= M")
    p.add_argument("--deep-provenance", help="free-text origin of the deep features (layer, model)")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("cam", parents=[common], help="saliency maps from exported tensors")
    p.add_argument("activations")
    p.add_argument("--method", default="eigen", help="comma list of grad, score, eigen")
    p.add_argument("--gradients")
    p.add_argument("--weights")
    p.add_argument("--softmax", action="store_true", help="softmax the Score-CAM weights")
    p.add_argument("--size", type=int, nargs=2, metavar=("H", "W"), help="upsample maps to H x W")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_cam)

    p = sub.add_parser("report", parents=[common], help="text summary of an explain report")
    p.add_argument("explain")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        args.func(args, cfg)
    except RadExplainError as exc:
        print(f"radexplain {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, KeyError, ValueError) as exc:
        print(f"radexplain {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
