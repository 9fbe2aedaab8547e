"""Python bindings for the garrote penalized-regression library."""

from pathlib import Path

from ._core import (
    BootstrapSummary,
    Dataset,
    Family,
    FitResult,
    NumericalError,
    PredictionReport,
    SelectorFit,
    UsageError,
    auc,
    best_subset,
    bland_altman,
    bootstrap,
    collinearity,
    cv_prediction_error,
    drop_one_r2,
    fit,
    load_bodyfat,
    load_csv,
    load_prostate,
    nng_fit,
    ols,
    r_squared,
    standardize,
    synthetic_highdim,
)


def data_dir() -> Path:
    """Directory holding prostate.csv and bodyfat.csv (installed copy if present)."""
    packaged = Path(__file__).parent / "data"
    if (packaged / "prostate.csv").exists():
        return packaged
    from ._core import bundled_data_dir

    return Path(bundled_data_dir())


def prostate() -> Dataset:
    return load_prostate(data_dir())


def bodyfat() -> Dataset:
    return load_bodyfat(data_dir())


__all__ = [name for name in dir() if not name.startswith("_")]
