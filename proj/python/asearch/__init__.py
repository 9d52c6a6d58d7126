"""Multi-agent active search: Python front end to the C++ core."""

import json

from . import _asearch
from ._asearch import ScenarioError, e_step, run_em

__all__ = [
    "ScenarioError",
    "demo_scenario",
    "e_step",
    "metrics_from_csv",
    "run_em",
    "run_episode",
    "sweep",
    "validate_scenario",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else json.dumps(scenario)


def demo_scenario():
    return json.loads(_asearch.demo_scenario())


def validate_scenario(scenario):
    _asearch.validate_scenario(_text(scenario))


def run_episode(scenario, seed):
    return json.loads(_asearch.run_episode(_text(scenario), seed))


def sweep(scenario, algorithms=("GUTS", "NATS", "COVERAGE"), seeds=range(20), jobs=1):
    """Returns (results CSV text, metrics dict)."""
    csv, metrics = _asearch.sweep(_text(scenario), list(algorithms), list(seeds), jobs)
    return csv, json.loads(metrics)


def metrics_from_csv(csv, team_size, num_oois, budget):
    return json.loads(_asearch.metrics_from_csv(csv, team_size, num_oois, budget))
