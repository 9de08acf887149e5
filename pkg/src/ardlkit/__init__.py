"""ARDL bounds-testing toolkit: time-series plumbing, OLS core, lag search,
bounds cointegration test, long-run/turning-point analysis, UECM estimation,
Monte Carlo critical values, and a batch CLI."""

from .ardl import (
    ArdlFit,
    BoundsTestResult,
    CriticalBounds,
    Decision,
    Design,
    LagOrder,
    ModelSpec,
    SelectionResult,
    bounds_test,
    build_design,
    critical_bounds,
    decide,
    fit_ardl,
    select_lags,
)
from .batch import (
    COUNTRY_CODES,
    MODEL_IDS,
    CountryRow,
    RunConfig,
    load_config,
    preset,
    render,
    run,
)
from .critval import McBounds, McConfig, simulate_bounds
from .longrun import (
    LongRunResult,
    Shape,
    UecmResult,
    classify_shape,
    estimate_uecm,
    in_sample,
    long_run,
    turning_point,
)
from .manifest import Manifest, ManifestError, load_country, load_manifest
from .regression import (
    OlsFit,
    RankDeficientError,
    Significance,
    ols,
    sic,
    student_t_pvalue,
    t_marks,
    wald_f,
)
from .synthetic import write_demo_data
from .timeseries import (
    AlignedFrame,
    AlignmentError,
    Dataset,
    LoadError,
    LoadResult,
    TimeSeries,
    align,
    difference,
    lag,
    load_csv,
    transform,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedFrame",
    "AlignmentError",
    "ArdlFit",
    "BoundsTestResult",
    "COUNTRY_CODES",
    "CountryRow",
    "CriticalBounds",
    "Dataset",
    "Decision",
    "Design",
    "LagOrder",
    "LoadError",
    "LoadResult",
    "LongRunResult",
    "MODEL_IDS",
    "Manifest",
    "ManifestError",
    "McBounds",
    "McConfig",
    "ModelSpec",
    "OlsFit",
    "RankDeficientError",
    "RunConfig",
    "SelectionResult",
    "Shape",
    "Significance",
    "TimeSeries",
    "UecmResult",
    "align",
    "bounds_test",
    "build_design",
    "classify_shape",
    "critical_bounds",
    "decide",
    "difference",
    "estimate_uecm",
    "fit_ardl",
    "in_sample",
    "lag",
    "load_config",
    "load_country",
    "load_csv",
    "load_manifest",
    "long_run",
    "ols",
    "preset",
    "render",
    "run",
    "select_lags",
    "sic",
    "simulate_bounds",
    "student_t_pvalue",
    "t_marks",
    "transform",
    "turning_point",
    "wald_f",
    "write_csv",
    "write_demo_data",
    "__version__",
]
