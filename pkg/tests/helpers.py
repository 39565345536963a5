import numpy as np

from lurye_ozf.matrix.hyperdominant import permutation_matrix
from lurye_ozf.signal.signals import SequencePair, Signal


def random_doubly_stochastic(rng, n, n_perms):
    weights = rng.dirichlet(np.ones(n_perms))
    return sum(w * permutation_matrix(rng.permutation(n)) for w in weights)


def random_conic(rng, n, n_terms):
    M = np.zeros((n, n))
    for _ in range(n_terms):
        M += rng.uniform(0.1, 2.0) * (np.eye(n) - permutation_matrix(rng.permutation(n)))
    return M


def pair(v, w, start=0):
    return SequencePair(Signal.from_array(v, start), Signal.from_array(w, start))
