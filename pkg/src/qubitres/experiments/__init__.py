"""Figure reproduction, sweeps, configuration and output."""
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .figures import FigureResult, TimeSeries, run_figure, sweep
from .io import emit
