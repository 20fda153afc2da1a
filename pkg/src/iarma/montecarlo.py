"""Monte Carlo harness for finite-sample studies of the ML estimator.

A cell simulates M independent replicates of a design (series length, true
parameters, gap law), fits each by maximum likelihood, and aggregates the
estimates the way simulation tables report them:

    mean      average of the M estimates
    se_hat    average of the per-replicate Hessian standard errors
    se_emp    empirical standard deviation of the estimates (ddof=1)
    bias      mean - truth
    rmse      sqrt(se_hat**2 + bias**2)
    cv        se_hat / |mean|
    mce       se_emp / sqrt(M_used)   (Monte Carlo error of the mean)

Reproducibility: replicate m of cell i derives its randomness from
``SeedSequence(base_seed, spawn_key=(i, m))``, split once into a gap stream
and an innovation stream.  Streams never depend on scheduling, and
aggregation runs in replicate order, so a cell is bit-identical for a given
base seed no matter how many worker processes are used.  In fixed-grid mode
the gap stream is ``SeedSequence(base_seed, spawn_key=(i,))``, shared by all
replicates.

Replicates whose fit does not converge are excluded from the aggregates and
counted; a cell with more than 1% exclusions is flagged.  Standard-error
averages cover the replicates where the Hessian was available (``n_se``),
which can be fewer than M when estimates land on the parameter box boundary.
Each replicate fit demeans by the sample mean by default, matching the
default of :func:`iarma.estimate.fit_ml`; set ``demean=False`` on the design
to fit with the level pinned at zero.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DataError, IarmaError, ParameterError
from .estimate import fit_ml
from .model import IrregularSeries, ModelParams, sample_gaps, simulate, times_from_gaps

__all__ = [
    "MCDesign",
    "ParamSummary",
    "MCCell",
    "MCError",
    "run_replicate",
    "run_cell",
    "run_grid",
    "cells_to_csv",
]

_GAP_LAWS = ("regular", "exp")


@dataclass(frozen=True)
class MCDesign:
    """One simulation cell: series length, truth, gap law, and seeding."""

    n: int
    phi: float
    theta: float
    sigma2: float = 1.0
    gap_law: str = "exp"
    gap_rate: float = 1.0
    m: int = 1000
    base_seed: int = 0
    cell_index: int = 0
    demean: bool = True
    fixed_grid: bool = False

    def __post_init__(self):
        if self.n < 3:
            raise ParameterError(f"series length must be >= 3, got {self.n}")
        if self.m < 2:
            raise ParameterError(f"replicate count must be >= 2, got {self.m}")
        if not 0.0 <= self.phi < 1.0:
            raise ParameterError(f"phi must be in [0, 1), got {self.phi}")
        if not 0.0 <= self.theta < 1.0:
            raise ParameterError(f"theta must be in [0, 1), got {self.theta}")
        if self.sigma2 <= 0.0:
            raise ParameterError(f"sigma2 must be > 0, got {self.sigma2}")
        if self.gap_law not in _GAP_LAWS:
            raise ParameterError(f"gap law must be one of {_GAP_LAWS}, got {self.gap_law!r}")
        if self.gap_rate <= 0.0:
            raise ParameterError(f"gap rate must be > 0, got {self.gap_rate}")

    @property
    def params(self) -> ModelParams:
        return ModelParams(phi=self.phi, theta=self.theta, sigma2=self.sigma2)


@dataclass(frozen=True)
class ParamSummary:
    """Aggregates for one parameter of one cell."""

    name: str
    truth: float
    mean: float
    se_hat: float
    se_emp: float
    bias: float
    rmse: float
    cv: float
    mce: float
    n_se: int


@dataclass(frozen=True)
class MCCell:
    """Aggregated outcome of one design cell."""

    design: MCDesign
    phi: ParamSummary
    theta: ParamSummary
    n_used: int
    failures: int
    flagged: bool


@dataclass(frozen=True)
class MCError:
    """A cell that could not be run; kept in grid output in place."""

    design: Optional[MCDesign]
    message: str


def _replicate_gaps(design: MCDesign, m: int) -> np.ndarray:
    if design.fixed_grid:
        seed = np.random.SeedSequence(design.base_seed, spawn_key=(design.cell_index,))
    else:
        seed = np.random.SeedSequence(
            design.base_seed, spawn_key=(design.cell_index, m)
        ).spawn(2)[0]
    return sample_gaps(design.gap_law, design.n - 1, seed=seed, lam=design.gap_rate)


def run_replicate(design: MCDesign, m: int) -> tuple[float, float, float, float, bool]:
    """Simulate and fit replicate ``m``; returns (phi, theta, se_phi, se_theta, converged).

    Fit failures are reported as a non-converged replicate with NaN entries
    rather than raised, so a single bad draw cannot abort a cell.
    """
    noise_seed = np.random.SeedSequence(
        design.base_seed, spawn_key=(design.cell_index, m)
    ).spawn(2)[1]
    gaps = _replicate_gaps(design, m)
    series = simulate(design.params, times_from_gaps(gaps), seed=noise_seed)
    try:
        fit = fit_ml(series, demean=design.demean)
    except IarmaError:
        return math.nan, math.nan, math.nan, math.nan, False
    return fit.params.phi, fit.params.theta, fit.se_phi, fit.se_theta, fit.converged


def _worker(task: tuple[MCDesign, int]):
    return run_replicate(*task)


def _summary(name: str, truth: float, est: np.ndarray, ses: np.ndarray) -> ParamSummary:
    mean = float(est.mean())
    se_emp = float(est.std(ddof=1))
    bias = mean - truth
    finite = ses[np.isfinite(ses)]
    se_hat = float(finite.mean()) if finite.size else math.nan
    rmse = math.sqrt(se_hat * se_hat + bias * bias) if math.isfinite(se_hat) else math.nan
    cv = se_hat / abs(mean) if mean != 0.0 else math.inf
    return ParamSummary(
        name=name, truth=truth, mean=mean, se_hat=se_hat, se_emp=se_emp,
        bias=bias, rmse=rmse, cv=cv, mce=se_emp / math.sqrt(est.size),
        n_se=int(finite.size),
    )


def run_cell(design: MCDesign, jobs: Optional[int] = None) -> MCCell:
    """Run every replicate of one design and aggregate.

    ``jobs`` > 1 fans replicates out to worker processes; results are
    identical to a serial run because each replicate owns its seed stream
    and aggregation order is fixed by replicate index.
    """
    tasks = [(design, m) for m in range(design.m)]
    if jobs is not None and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, design.m // (8 * jobs))
            rows = list(pool.map(_worker, tasks, chunksize=chunk))
    else:
        rows = [_worker(t) for t in tasks]
    table = np.asarray(rows, dtype=np.float64)
    converged = table[:, 4] == 1.0
    used = table[converged]
    failures = int(design.m - used.shape[0])
    if used.shape[0] < 2:
        raise DataError(
            f"only {used.shape[0]} of {design.m} replicates converged; cell unusable"
        )
    return MCCell(
        design=design,
        phi=_summary("phi", design.phi, used[:, 0], used[:, 2]),
        theta=_summary("theta", design.theta, used[:, 1], used[:, 3]),
        n_used=int(used.shape[0]),
        failures=failures,
        flagged=failures > 0.01 * design.m,
    )


def run_grid(
    designs: Sequence[MCDesign], jobs: Optional[int] = None
) -> list[Union[MCCell, MCError]]:
    """Run a list of cells; output order matches input.

    A failing cell is recorded as :class:`MCError` in its slot and does not
    abort the remaining cells.
    """
    out: list[Union[MCCell, MCError]] = []
    for design in designs:
        try:
            out.append(run_cell(design, jobs=jobs))
        except IarmaError as exc:
            out.append(MCError(design=design, message=str(exc)))
    return out


_CSV_COLUMNS = [
    "n", "phi", "theta", "sigma2", "gap_law", "gap_rate", "m", "base_seed",
    "param", "truth", "mean", "se_hat", "se_emp", "bias", "rmse", "cv",
    "mce", "n_converged", "n_se", "flagged", "error",
]


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def cells_to_csv(outcomes: Sequence[Union[MCCell, MCError]], path=None) -> str:
    """Serialize grid outcomes as CSV, one row per (cell, parameter).

    Failed cells produce a single row with the ``error`` column set.
    Returns the CSV text; also writes it to ``path`` when given.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for outcome in outcomes:
        design = outcome.design
        head = (
            [design.n, _fmt(design.phi), _fmt(design.theta), _fmt(design.sigma2),
             design.gap_law, _fmt(design.gap_rate), design.m, design.base_seed]
            if design is not None
            else [""] * 8
        )
        if isinstance(outcome, MCError):
            writer.writerow(head + [""] * 11 + ["", outcome.message])
            continue
        for s in (outcome.phi, outcome.theta):
            writer.writerow(
                head
                + [s.name, _fmt(s.truth), _fmt(s.mean), _fmt(s.se_hat), _fmt(s.se_emp),
                   _fmt(s.bias), _fmt(s.rmse), _fmt(s.cv), _fmt(s.mce),
                   outcome.n_used, s.n_se, int(outcome.flagged), ""]
            )
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def default_jobs() -> int:
    """Worker count the CLI uses when none is requested."""
    return max(1, os.cpu_count() or 1)
