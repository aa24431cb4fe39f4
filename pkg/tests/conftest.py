import pytest

from entscale import cli, exactcover, solver

_CACHE = {}


def build_ensemble(n, k, count, base_seed=None):
    """Sweep profiles for ``count`` generated instances, cached for the session."""
    base_seed = 1000 * k + n if base_seed is None else base_seed
    key = (n, k, count, base_seed)
    if key not in _CACHE:
        seeds = cli.instance_seeds(base_seed, count)
        instances = [exactcover.generate_instance(n, k, s) for s in seeds]
        _CACHE[key] = (instances, solver.sweep_many(instances))
    return _CACHE[key]


@pytest.fixture(scope="session")
def ensemble():
    return build_ensemble
