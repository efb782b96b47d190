import numpy as np


def rng_for(*key) -> np.random.Generator:
    """Deterministic per-test generator; key parts become the seed sequence."""
    return np.random.default_rng(list(key))


def random_pair(rng, max_n=60, max_m=60, sigma=8, min_n=0, min_m=0):
    n = int(rng.integers(min_n, max_n + 1))
    m = int(rng.integers(min_m, max_m + 1))
    return rng.integers(0, sigma, n), rng.integers(0, sigma, m)


def quadratic_match_count(a, b) -> int:
    a = np.asarray(a).reshape(-1, 1)
    b = np.asarray(b).reshape(1, -1)
    if a.size == 0 or b.size == 0:
        return 0
    return int((a == b).sum())


def lcs_python(a, b) -> int:
    """Independent pure-python LCS used to cross-check compiled kernels."""
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def edit_python(a, b) -> int:
    """Independent pure-python Wagner-Fischer."""
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (0 if x == y else 1)))
        prev = cur
    return prev[-1]
