"""Modeling of discrete-time series observed at irregularly spaced times.

A first-order autoregressive moving average process defined directly on an
irregular observation grid: exact Gaussian simulation, one-step prediction
with mean squared errors, maximum-likelihood estimation with numerical
standard errors, residual diagnostics, and a Monte Carlo harness for
finite-sample studies.  On a unit-gap grid everything reduces to the
classical ARMA(1,1).
"""

from .diagnostics import AcfEstimate, LjungBoxResult, acf, ljung_box, qq_data
from .errors import (
    DataError,
    FitError,
    IarmaError,
    NumericalError,
    ParameterError,
    TimeGridError,
)
from .estimate import (
    BOUND_EPS,
    FitResult,
    WaldTest,
    fit_ml,
    loglik,
    reduced_likelihood,
    standard_errors,
    wald_test,
)
from .io import read_series_csv, write_series_csv
from .model import (
    C_FLOOR,
    CfSequence,
    IrregularSeries,
    ModelParams,
    autocorr,
    autocov,
    c1,
    cf_sequence,
    gamma0,
    gamma1,
    lag1_autocorr,
    sample_gaps,
    simulate,
    times_from_gaps,
)
from .montecarlo import (
    MCCell,
    MCDesign,
    MCError,
    ParamSummary,
    cells_to_csv,
    run_cell,
    run_grid,
    run_replicate,
)
from .predict import (
    InnovationTrace,
    StateTrace,
    forecast_bands,
    predict_innovations,
    predict_statespace,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "ModelParams", "IrregularSeries", "CfSequence", "C_FLOOR",
    "c1", "cf_sequence", "gamma0", "gamma1", "autocov", "autocorr",
    "lag1_autocorr", "simulate", "sample_gaps", "times_from_gaps",
    # prediction
    "InnovationTrace", "StateTrace",
    "predict_innovations", "predict_statespace", "forecast_bands",
    # estimation
    "BOUND_EPS", "FitResult", "WaldTest",
    "loglik", "reduced_likelihood", "fit_ml", "standard_errors", "wald_test",
    # diagnostics
    "AcfEstimate", "LjungBoxResult", "acf", "ljung_box", "qq_data",
    # monte carlo
    "MCDesign", "MCCell", "MCError", "ParamSummary",
    "run_replicate", "run_cell", "run_grid", "cells_to_csv",
    # io
    "read_series_csv", "write_series_csv",
    # errors
    "IarmaError", "ParameterError", "TimeGridError", "DataError",
    "NumericalError", "FitError",
]
