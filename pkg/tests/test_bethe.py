# tests/test_bethe.py

import math

import numpy as np
import pytest

from rscavity.models.bethe import bethe, bethe_beta
from rscavity.models.population import Population, iterate
from rscavity.models.thresholds import moment_bounds
from rscavity.utils.errors import InputError

LOG2 = math.log(2.0)


@pytest.fixture(scope="module")
def pop_d1():
    return iterate(1.0, 3, 20000, 10, seed=1, threads=2).population


def test_zero_density_is_log_two():
    pop = Population(np.linspace(0.1, 0.9, 100))
    estimate = bethe(pop, 0.0, 3, 5000, seed=1)
    assert estimate.value == pytest.approx(LOG2, abs=1e-12)
    assert estimate.variable_term == pytest.approx(LOG2, abs=1e-12)


def test_value_is_variable_minus_clause_term(pop_d1):
    est = bethe(pop_d1, 1.0, 3, 20000, seed=3)
    assert est.value == pytest.approx(est.variable_term - (2 / 3) * est.clause_term, abs=1e-12)
    assert est.mc_samples + est.degenerate == 20000


def test_same_seed_same_estimate(pop_d1):
    a = bethe(pop_d1, 1.0, 3, 10000, seed=4, threads=1)
    b = bethe(pop_d1, 1.0, 3, 10000, seed=4, threads=3)
    assert a == b


def test_small_beta_tends_to_log_two(pop_d1):
    est = bethe_beta(pop_d1, 1.0, 3, 1e-9, 5000, seed=5)
    assert est.value == pytest.approx(LOG2, abs=1e-6)


def test_zero_density_soft_is_log_two():
    pop = Population(np.linspace(0.1, 0.9, 100))
    assert bethe_beta(pop, 0.0, 3, 3.0, 2000, seed=5).value == pytest.approx(LOG2, abs=1e-12)


def test_large_beta_matches_sharp_functional(pop_d1):
    sharp = bethe(pop_d1, 1.0, 3, 20000, seed=6)
    soft = bethe_beta(pop_d1, 1.0, 3, 50.0, 20000, seed=6)
    assert soft.beta == 50.0
    assert soft.value == pytest.approx(sharp.value, abs=1e-12)


def test_soft_clause_term_decreases_with_beta(pop_d1):
    terms = [bethe_beta(pop_d1, 1.0, 3, beta, 5000, seed=7).clause_term for beta in (0.5, 1.0, 2.0, 8.0)]
    assert terms == sorted(terms, reverse=True)


def test_rejects_bad_arguments(pop_d1):
    with pytest.raises(InputError):
        bethe_beta(pop_d1, 1.0, 3, 0.0, 100, seed=1)
    with pytest.raises(InputError):
        bethe(pop_d1, -1.0, 3, 100, seed=1)
    with pytest.raises(InputError):
        bethe(pop_d1, 1.0, 3, 0, seed=1)


@pytest.mark.slow
def test_estimate_between_moment_bounds():
    pop = iterate(1.0, 3, 100_000, 25, seed=0).population
    est = bethe(pop, 1.0, 3, 400_000, seed=1)
    bounds = moment_bounds(1.0, 3)
    assert bounds.second_moment < est.value < bounds.first_moment
