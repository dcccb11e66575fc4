"""
Shared fixtures: small groups, point actions and seeded random densities.
"""
import random
from fractions import Fraction

import pytest

from components.action import Space, product_action, rotation_action, trivial_action
from components.groups import FreeAbelianGroup, FreeGroup, ball, lamplighter, sign_flip_product
from components.measure import FinSignedFunction
from components.semidirect_nets import product_net
from models.data_models import NetFunction


@pytest.fixture
def z():
    return FreeAbelianGroup(1)


@pytest.fixture
def z2():
    return FreeAbelianGroup(2)


@pytest.fixture
def f2():
    return FreeGroup(2)


@pytest.fixture(scope="session")
def lamps():
    return lamplighter(2)


@pytest.fixture(scope="session")
def sign_flip():
    return sign_flip_product(1)


@pytest.fixture
def rng():
    return random.Random(20240611)


def point_action(G):
    return trivial_action(Space.point(), G)


def random_function(rng, G, size=6, radius=3, positive=True):
    """Nonnegative function with rational values on a random finite subset of G"""
    support = {G.random_element(rng, radius) for _ in range(rng.randint(1, size))}
    low = 1 if positive else 0
    return FinSignedFunction({t: Fraction(rng.randint(low, 9), rng.randint(1, 9)) for t in support})


def random_density(rng, G, size=6, radius=3):
    f = random_function(rng, G, size, radius)
    mass = sum((v * G.haar_weight(t) for t, v in f.items()), Fraction(0))
    return FinSignedFunction({t: v / mass for t, v in f.items()})


def rotation_setup(G, order=3):
    """Product action on a point space times an order-n rotation of the acting factor"""
    T_H = rotation_action(order, G.acting)
    T_N = trivial_action(T_H.space, G.normal)
    return product_action(T_N, T_H, G)


def random_factor(rng, group, points, stage=0):
    return NetFunction(stage, {x: random_density(rng, group, size=5, radius=3) for x in points})


def randomized_bound_inputs(G, rng, trials):
    T = rotation_setup(G)
    points = T.space.factors[1].points
    window = list(ball(G, radius=1))
    for _ in range(trials):
        f = random_factor(rng, G.normal, points)
        g = random_factor(rng, G.acting, points)
        E = product_net(f, g, G)
        r = rng.choice(window + [G.random_element(rng, 3)])
        point = (rng.choice(points), rng.choice(points))
        yield T, f, g, E, r, point
