"""Black box label-shift estimation, detection, and correction.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. Hard predictions are 1-D integer arrays, soft predictions 2-D
arrays of per-class probabilities.
"""

from labelshift._core import (
    ConfusionMatrix,
    DomainError,
    FormatError,
    ShiftReport,
    SoftmaxModel,
    SupportError,
    WeightEstimate,
    __version__,
    apply_knockout,
    assumption_check_mmd,
    bbsc_correct,
    chi2_two_sample,
    corner_means,
    default_delta,
    detect_label_shift,
    dirichlet_shift,
    error_bound,
    estimate_confusion,
    estimate_label_marginal,
    estimate_pred_marginal,
    estimate_weights,
    gen_gaussian_mixture,
    ks_two_sample,
    load_idx,
    loss_and_grad,
    predict_hard,
    predict_soft,
    resample_by_label,
    run_experiment,
    smallest_singular_value,
    solve_weights,
    train_softmax,
    tweak_one,
)

__all__ = [
    "ConfusionMatrix",
    "DomainError",
    "FormatError",
    "ShiftReport",
    "SoftmaxModel",
    "SupportError",
    "WeightEstimate",
    "__version__",
    "apply_knockout",
    "assumption_check_mmd",
    "bbsc_correct",
    "chi2_two_sample",
    "corner_means",
    "default_delta",
    "detect_label_shift",
    "dirichlet_shift",
    "error_bound",
    "estimate_confusion",
    "estimate_label_marginal",
    "estimate_pred_marginal",
    "estimate_weights",
    "gen_gaussian_mixture",
    "ks_two_sample",
    "load_idx",
    "loss_and_grad",
    "predict_hard",
    "predict_soft",
    "resample_by_label",
    "run_experiment",
    "smallest_singular_value",
    "solve_weights",
    "train_softmax",
    "tweak_one",
]
