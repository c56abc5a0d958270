"""orbitfed: federated learning over LEO constellations with sink-satellite scheduling."""
from .scenario import Scenario, ScenarioError, load_scenario
from .sim_runner import SimContext, compare, compare_results, run_fedleo, run_star_baseline

__version__ = "0.1.0"

__all__ = [
    "Scenario", "ScenarioError", "SimContext", "compare", "compare_results",
    "load_scenario", "run_fedleo", "run_star_baseline",
]
