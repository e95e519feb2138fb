"""Verification scores and differentiable losses for gridded binary forecasts.

Fields are 2-D float arrays. Spectral operations also need the grid spacing
in degrees; neighbourhood ones work in pixels.
"""

import json

from ._selfs import (
    ArgumentError,
    FormatError,
    IoError,
    NumericError,
    TruncationError,
    ValidationError,
    __version__,
    configs,
    decode_grid,
    encode_grid,
    fourier_band_pass,
    grad_check,
    loss,
    loss_gradient,
    max_filter,
    mean_filter,
    negatively_oriented,
    rank_column,
    read_grid,
    run_cli,
    score,
    synth_mask,
    wavelet_band_pass,
    write_grid,
)
from ._selfs import evaluate_json as _evaluate_json


def evaluate(model, p, y, n_boot=1000, n_boot_bars=100, level=0.95, seed=0):
    """Attributes and performance diagrams with bootstrap intervals, as a dict."""
    return json.loads(_evaluate_json(model, list(p), list(y), n_boot, n_boot_bars, level, seed))


__all__ = [
    "ArgumentError",
    "FormatError",
    "IoError",
    "NumericError",
    "TruncationError",
    "ValidationError",
    "configs",
    "decode_grid",
    "encode_grid",
    "evaluate",
    "fourier_band_pass",
    "grad_check",
    "loss",
    "loss_gradient",
    "max_filter",
    "mean_filter",
    "negatively_oriented",
    "rank_column",
    "read_grid",
    "run_cli",
    "score",
    "synth_mask",
    "wavelet_band_pass",
    "write_grid",
]
