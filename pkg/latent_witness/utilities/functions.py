"""functions.py

Extra Functions Condensed for Ease-of-Use

"""
import hashlib

import numpy as np
from scipy.special import ndtr


def normal_tail(z):
    """Upper Gaussian Tail 1 - Phi(z), Evaluated as Phi(-z)

    Parameters
    ----------
    z : float or array_like
        Argument(s)

    Returns
    -------
    float or array_like
        1 - Phi(z)
    """
    return ndtr(-np.asarray(z, dtype=float))


def seed_sequence(seed):
    """Wraps an Integer Seed (or Passes a SeedSequence Through)"""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def spawn_generators(seed, count):
    """Derives Independent Generators from a Master Seed

    The i-th child only depends on (seed, i), so a task gets the same stream
    no matter which worker runs it.

    Parameters
    ----------
    seed : int or np.random.SeedSequence
        Master seed
    count : int
        Number of child generators

    Returns
    -------
    list(np.random.Generator)
    """
    return [np.random.default_rng(child) for child in seed_sequence(seed).spawn(count)]


def as_generator(rng):
    """Accepts a Seed, a SeedSequence or a Generator and Returns a Generator"""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def chunk_sizes(total, chunk):
    """Splits a Repetition Count into Fixed-Size Chunks (Last One Shorter)

    Parameters
    ----------
    total : int
        Number of repetitions
    chunk : int
        Repetitions per chunk

    Returns
    -------
    list(int)
    """
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


def array_checksum(array):
    """SHA-256 of the Little-Endian Float64 Bytes of an Array

    Parameters
    ----------
    array : array_like
        Values to hash

    Returns
    -------
    str
        Hex digest
    """
    data = np.ascontiguousarray(np.asarray(array, dtype="<f8"))
    return hashlib.sha256(data.tobytes()).hexdigest()


def file_checksum(path):
    """SHA-256 of a File's Contents, Read in 1 MiB Chunks"""
    digest = hashlib.sha256()
    with open(path, "rb") as file:
        for chunk in iter(lambda: file.read(1024 * 1024), b""):
            digest.update(chunk)
    return digest.hexdigest()
