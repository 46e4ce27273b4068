import numpy as np
import pytest

import dwslasso as dl
from dwslasso.linalg import objective


def make_instance(n=300, s=5, seed=0, **kw):
    return dl.generate(dl.GeneratorConfig(n=n, s=s, seed=seed, **kw))


def instance_objective(inst, x):
    return objective(inst.a, inst.b, inst.eta, x)


@pytest.fixture(scope="session")
def small_instance():
    return make_instance()


@pytest.fixture(scope="session")
def oracle_cache():
    """Memoized high-precision reference solves, keyed by instance identity."""
    cache = {}

    def get(inst, tol=1e-12):
        key = (inst.seed, inst.n, inst.k, inst.s, float(inst.eta), tol)
        if key not in cache:
            cache[key] = dl.solve_full_oracle(inst, tol)
        return cache[key]

    return get
