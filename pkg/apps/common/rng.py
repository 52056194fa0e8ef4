"""Générateur pseudo-aléatoire déterministe et divisible (seed, index)."""

import numpy as np

from apps.common.conf import get_setting


class SeededGenerator:
    """
    Enveloppe autour de ``numpy.random.Generator`` (PCG64).

    ``spawn(i)`` dérive un générateur enfant à partir de (seed, chemin, i) :
    le résultat ne dépend pas de l'ordre d'exécution des essais.
    """

    def __init__(self, seed=None, path=()):
        self._seed = get_setting('DEFAULT_SEED') if seed is None else int(seed)
        self._path = tuple(path)
        sequence = np.random.SeedSequence(self._seed, spawn_key=self._path)
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def seed(self):
        return self._seed

    @property
    def name(self):
        return get_setting('GENERATOR')

    @property
    def generator(self):
        return self._generator

    def spawn(self, index):
        return SeededGenerator(self._seed, self._path + (int(index),))

    def normal(self, size):
        return self._generator.normal(size=size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def multinomial(self, shots, probabilities):
        return self._generator.multinomial(shots, probabilities)


def as_generator(rng):
    """Accepte un SeededGenerator, un entier (seed) ou None."""
    if isinstance(rng, SeededGenerator):
        return rng
    return SeededGenerator(rng)
