import numpy as np

from macap_cli.channel import PathSet

def random_hermitian_pd(rng, size):
    X = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return X @ X.conj().T + np.eye(size)

def random_channel(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))

def random_paths(rng, count):
    return PathSet(rng.uniform(0, np.pi, count), rng.uniform(0, np.pi, count))
