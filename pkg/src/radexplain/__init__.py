"""Radiomic features, rank-correlation explanation of deep features, and CAM reconstruction."""
