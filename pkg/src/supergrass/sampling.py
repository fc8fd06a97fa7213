"""Deterministic random draws used by the verification suites and tests."""

from __future__ import annotations

import numpy as np

from .grassmann import Algebra, GrassmannElement


def random_element(alg: Algebra, rng: np.random.Generator,
                   scale: float = 1.0) -> GrassmannElement:
    """Dense random element with complex-normal coefficients on all blades."""
    v = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
    return alg.from_vector(v * scale)


def random_even(alg: Algebra, rng: np.random.Generator,
                scale: float = 1.0) -> GrassmannElement:
    return random_element(alg, rng, scale).even()


def random_odd(alg: Algebra, rng: np.random.Generator,
               scale: float = 1.0) -> GrassmannElement:
    return random_element(alg, rng, scale).odd()


def random_body(rng: np.random.Generator, radius: float = 0.5) -> complex:
    """Uniform draw from the complex disk of the given radius."""
    r = radius * np.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return complex(r * np.cos(phi), r * np.sin(phi))


def admissible_even(alg: Algebra, rng: np.random.Generator,
                    radius: float = 0.5) -> GrassmannElement:
    """Body-only even parameter with |body| <= radius."""
    return alg.scalar(random_body(rng, radius))


def admissible_odd(alg: Algebra, rng: np.random.Generator,
                   generator: int | None = None,
                   radius: float = 0.5) -> GrassmannElement:
    """Single-generator odd parameter: (complex) * e_j."""
    if generator is None:
        generator = int(rng.integers(1, alg.order + 1))
    return alg.generator(generator) * random_body(rng, radius)
