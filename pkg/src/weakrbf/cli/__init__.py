from weakrbf.cli.config import RunConfig, load_config
from weakrbf.cli.driver import convergence_study, run, simulate

__all__ = ["RunConfig", "load_config", "run", "simulate", "convergence_study"]
