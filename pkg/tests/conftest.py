import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20031013)


def dense_on_factors(U: np.ndarray, factors, targets) -> np.ndarray:
    """Full-space matrix of ``U`` acting on ``targets``, built by explicit index enumeration."""
    factors = list(factors)
    total = int(np.prod(factors))
    tdims = [factors[t] for t in targets]
    out = np.zeros((total, total), dtype=complex)
    for col in range(total):
        digits = list(np.unravel_index(col, factors))
        sub_in = np.ravel_multi_index([digits[t] for t in targets], tdims)
        for sub_out in range(U.shape[0]):
            amp = U[sub_out, sub_in]
            if amp == 0:
                continue
            new = list(digits)
            for t, d in zip(targets, np.unravel_index(sub_out, tdims)):
                new[t] = d
            out[np.ravel_multi_index(new, factors), col] += amp
    return out
