"""Giving deep features a meaning through rank correlation.

A synthetic deep-feature table contains three columns that are monotone
functions of radiomic features, buried among noise. Thresholded Spearman
counts pick them out, and the grouped view sums counts per base feature.
"""
from radexplain.synthetic import banded_dataset, planted_dataset
from radexplain.xaicorr import (
    build_report,
    correlation_matrix,
    correlation_trend,
    default_trend_grid,
    group_by_base,
    threshold_counts,
)

radiomic, deep, planted = planted_dataset(seed=1)
cm = correlation_matrix(radiomic, deep)
print("planted pairs:", planted)

# At a strict threshold only the planted pairs survive.
strict = threshold_counts(cm, thresholds=(0.9,))
for name, (count,) in zip(strict.radiomic_names, strict.counts):
    if count:
        print(f"  {name}: {count} deep feature(s) with rho >= 0.9")

# The trend curve drops from all pairs to the planted plateau.
grid = default_trend_grid(11)
print("M     :", " ".join(f"{m:5.1f}" for m in grid))
print("pairs :", " ".join(f"{t:5d}" for t in correlation_trend(cm, grid)))

# Deep features with graded correlation to one intensity feature.
radiomic, deep = banded_dataset()
cm = correlation_matrix(radiomic, deep)
grouped = group_by_base(threshold_counts(cm))
for base, row in zip(grouped.bases, grouped.counts):
    if row.any():
        print(f"{base:28s}", row.tolist())

# The full report is what `radexplain explain` writes to JSON.
report = build_report(cm)
print(sorted(report))
print("signed vs absolute at M=0.3:",
      int(threshold_counts(cm, (0.3,)).counts.sum()),
      int(threshold_counts(cm, (0.3,), mode="absolute").counts.sum()))
