"""Shared builders for seeded random test inputs."""

import random
from fractions import Fraction

from denseleaf.exact import GaussianRational, SparsePoly
from denseleaf.forms import OneForm
from denseleaf.distribution import SeparatedDistribution


def random_poly(rng: random.Random, num_vars: int, max_degree: int, max_terms: int = 4) -> SparsePoly:
    """Sparse polynomial with small Gaussian-integer coefficients."""
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        # exponent with total degree <= max_degree
        k = [0] * num_vars
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            k[rng.randrange(num_vars)] += 1
        c = GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3))
        if c:
            terms[tuple(k)] = terms.get(tuple(k), GaussianRational(0)) + c
    return SparsePoly(num_vars, {k: c for k, c in terms.items() if c})


def random_distribution(
    rng: random.Random, max_m: int = 4, max_n: int = 3, max_degree: int = 4
) -> SeparatedDistribution:
    """Seeded random separated system with M in [2, max_m], N in [1, max_n]."""
    M = rng.randint(2, max_m)
    N = rng.randint(1, max_n)
    forms = []
    for _ in range(N):
        forms.append(OneForm([random_poly(rng, M, max_degree) for _ in range(M)]))
    return SeparatedDistribution(forms)
