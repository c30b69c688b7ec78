"""Shared fixtures: bundled worked examples and random instance builders."""

import importlib.resources

import pytest

from balregret.core import Budgets, Instance, ItemCosts, MultiRepSelection
from balregret.instances import SplitMix64, load_instance


def _bundled(name: str) -> Instance:
    path = importlib.resources.files("balregret") / "data" / name
    return load_instance(str(path))


@pytest.fixture(scope="session")
def example_one() -> Instance:
    """Five items, pick two, one attack and one balancing raise."""
    return _bundled("example_one.json")


@pytest.fixture(scope="session")
def example_two() -> Instance:
    """Six items, pick three, two attacks and one balancing raise."""
    return _bundled("example_two.json")


def rand_mrs(rng: SplitMix64, n_lo: int = 3, n_hi: int = 6,
             max_parts: int = 2, cost_hi: int = 30, dev_hi: int = 30,
             gamma_hi: int = 3, gp_hi: int = 3,
             name: str = "rand") -> Instance:
    """A random multi-representative selection instance.

    Partitions are contiguous index blocks; every quota is at least one and
    strictly feasible.  Budgets are drawn independently from [0, the caps].
    """
    n = n_lo + rng.randint(0, n_hi - n_lo)
    num_parts = 1 + rng.randint(0, max_parts - 1)
    num_parts = min(num_parts, n)
    cuts = sorted({1 + rng.randint(0, n - 2) for _ in range(num_parts - 1)}
                  if n >= 2 else set())
    bounds = [0, *cuts, n]
    parts = [tuple(range(bounds[k], bounds[k + 1]))
             for k in range(len(bounds) - 1)]
    quotas = tuple(1 + rng.randint(0, len(p) - 1) for p in parts)
    c = tuple(rng.randint(0, cost_hi) for _ in range(n))
    d = tuple(rng.randint(0, dev_hi) for _ in range(n))
    gamma = rng.randint(0, min(gamma_hi, n))
    gp = rng.randint(0, min(gp_hi, n))
    return Instance(ItemCosts(c, d), Budgets(gamma, gp),
                    MultiRepSelection(parts, quotas), name=name)
