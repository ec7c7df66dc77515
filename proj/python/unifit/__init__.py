"""Uniform (max-norm) training of single-node classifiers.

The heavy lifting lives in the C++ extension module; this package re-exports
its public surface.
"""

from ._core import (
    Activation,
    BisectionConfig,
    BisectionReport,
    BisectionStep,
    ConfusionMatrix,
    ConvergenceError,
    DataError,
    Dataset,
    DegenerateRemovalError,
    GdConfig,
    WeightVector,
    activate,
    activate_inverse,
    classify,
    evaluate,
    first_k_per_class,
    forward,
    generate_synthetic,
    initial_bounds,
    mse_gradient,
    mse_loss,
    random_subset,
    read_ucr,
    remove_outliers_tolerance,
    remove_outliers_top_k,
    run_experiment,
    run_experiment_file,
    train_mse,
    train_uniform,
    uniform_loss,
    uniform_loss_maxrep,
    write_ucr,
)

__all__ = [
    "Activation",
    "BisectionConfig",
    "BisectionReport",
    "BisectionStep",
    "ConfusionMatrix",
    "ConvergenceError",
    "DataError",
    "Dataset",
    "DegenerateRemovalError",
    "GdConfig",
    "WeightVector",
    "activate",
    "activate_inverse",
    "classify",
    "evaluate",
    "first_k_per_class",
    "forward",
    "generate_synthetic",
    "initial_bounds",
    "mse_gradient",
    "mse_loss",
    "random_subset",
    "read_ucr",
    "remove_outliers_tolerance",
    "remove_outliers_top_k",
    "run_experiment",
    "run_experiment_file",
    "train_mse",
    "train_uniform",
    "uniform_loss",
    "uniform_loss_maxrep",
    "write_ucr",
]

__version__ = "0.1.0"
