from .config import ExperimentConfig, load, parse, render
from .pipelines import run_experiment
from .report import RunManifest, emit_report

__all__ = ["ExperimentConfig", "load", "parse", "render", "run_experiment", "RunManifest",
           "emit_report"]
