"""Monte Carlo experiments, summary statistics and persistence."""
from .config import (
    EXPERIMENTS, ExperimentConfig, config_from_dict, content_hash, load_config, parse_config,
)
from .persist import CSV_HEADER, dumps, load, parse_records, parse_summary, persist
from .runners import (
    ExperimentResult, Record, replicate_seed, run, run_chaos, run_clt, run_sheet,
    run_superposition, run_variance_scaling, run_vortex, simulate,
)
from .stats import SummaryStats, correlation_from_cov, weighted_line_fit
