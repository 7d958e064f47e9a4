import random

import pytest

from smbalg import (App, Const, Var, build_corpus, example_b2, example_e3,
                    example_n4, example_s2, Partition, term_variables)


@pytest.fixture(scope="session")
def e3():
    return example_e3()


@pytest.fixture(scope="session")
def b2():
    return example_b2()


@pytest.fixture(scope="session")
def s2():
    return example_s2()


@pytest.fixture(scope="session")
def n4():
    return example_n4()


@pytest.fixture(scope="session")
def e3_sim():
    return Partition(3, (0, 0, 1))


@pytest.fixture(scope="session")
def n4_sim():
    return Partition(4, (0, 0, 1, 1))


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


def random_term(rng: random.Random, signature: dict, nvars: int, depth: int,
                allow_const: int = 0):
    """A random term over the signature; element literals below allow_const."""
    if depth == 0 or rng.random() < 0.25:
        if allow_const and rng.random() < 0.3:
            return Const(rng.randrange(allow_const))
        return Var(rng.randrange(nvars))
    sym = rng.choice(sorted(signature))
    return App(sym, tuple(random_term(rng, signature, nvars, depth - 1, allow_const)
                          for _ in range(signature[sym])))


def random_term_all_vars(rng, signature, nvars, depth):
    """A random term in which every variable 0..nvars-1 actually appears."""
    for _ in range(200):
        t = random_term(rng, signature, nvars, depth)
        if len(term_variables(t)) == nvars:
            return t
    # fall back to wedging the missing variables in
    t = random_term(rng, signature, nvars, depth)
    for v in range(nvars):
        if v not in term_variables(t):
            t = App("wedge", (t, Var(v)))
    return t
