"""Self-normalized inference for time-series quantile and expected-shortfall
regressions: expanding-window estimation, the SN test statistic and
confidence intervals, the simulated pivotal limit distribution, IID/HAC
baselines, the Monte Carlo data-generating process and the Dynamic Quantile
diagnostic."""

from snreg._core import (
    BaselineTestResult,
    ConfigError,
    Contrast,
    CriticalValueTable,
    DataError,
    Dataset,
    DgpConfig,
    DqResult,
    EsFit,
    EstimatePath,
    HitSequence,
    MeatMode,
    NumericError,
    QrFit,
    SnTestResult,
    TailSide,
    TargetKind,
    baseline_t_test,
    compute_hits,
    critical_value,
    critical_value_table,
    default_epsilon,
    dq_test,
    expanding_es_path,
    expanding_qr_path,
    fit_es,
    fit_qr,
    generate,
    load_csv,
    normal_es_upper,
    normal_quantile,
    null_hypothesis_value,
    psi,
    simulate_w_samples,
    sn_confidence_interval,
    sn_matrix,
    sn_test,
    tick_loss,
    true_coefficients,
    write_csv,
)

__all__ = [
    "BaselineTestResult",
    "ConfigError",
    "Contrast",
    "CriticalValueTable",
    "DataError",
    "Dataset",
    "DgpConfig",
    "DqResult",
    "EsFit",
    "EstimatePath",
    "HitSequence",
    "MeatMode",
    "NumericError",
    "QrFit",
    "SnTestResult",
    "TailSide",
    "TargetKind",
    "baseline_t_test",
    "compute_hits",
    "critical_value",
    "critical_value_table",
    "default_epsilon",
    "dq_test",
    "expanding_es_path",
    "expanding_qr_path",
    "fit_es",
    "fit_qr",
    "generate",
    "load_csv",
    "normal_es_upper",
    "normal_quantile",
    "null_hypothesis_value",
    "psi",
    "simulate_w_samples",
    "sn_confidence_interval",
    "sn_matrix",
    "sn_test",
    "tick_loss",
    "true_coefficients",
    "write_csv",
]

__version__ = "0.1.0"
