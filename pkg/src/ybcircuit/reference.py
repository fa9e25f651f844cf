"""Closed-form spectra of the homogeneous transfer matrices for m = 1, 2, 3.

Each entry is (name, value, degeneracy, Jordan block sizes).
"""

import numpy as np

S3 = np.sqrt(3.0)


def _entries(lam):
    q = 1 + lam**2
    return {
        "one": 1.0,
        "t1": lam**2 / q,
        "spin2": lam**2 * (lam**2 - 1) / q**2,
        "singlet2": lam**2 * (lam**2 + 2) / q**2,
        "a": lam**3 * (lam**3 + 2 * lam + S3) / q**3,
        "vac3": lam**4 * (lam**2 - 3) / q**3,
        "b": lam**4 * (lam**2 + 3) / q**3,
        "c": lam**4 * (lam**2 + 2) / q**3,
        "d": lam**3 * (lam**3 - S3) / q**3,
        "e": lam**3 * (lam**3 + S3) / q**3,
        "f": lam**3 * (lam**3 + 2 * lam - S3) / q**3,
    }


_STRUCTURE = {
    1: [("one", 1, (1,)), ("t1", 3, (1, 1, 1))],
    2: [
        ("one", 1, (1,)),
        ("t1", 9, (3, 3, 3)),
        ("spin2", 5, (1,) * 5),
        ("singlet2", 1, (1,)),
    ],
    3: [
        ("one", 1, (1,)),
        ("t1", 18, (5, 5, 5, 1, 1, 1)),
        ("singlet2", 3, (3,)),
        ("spin2", 15, (3,) * 5),
        ("a", 3, (1,) * 3),
        ("vac3", 7, (1,) * 7),
        ("b", 1, (1,)),
        ("c", 3, (1,) * 3),
        ("d", 5, (1,) * 5),
        ("e", 5, (1,) * 5),
        ("f", 3, (1,) * 3),
    ],
}


def analytic_spectrum(m, lam):
    """List of (name, value, degeneracy, blocks) for the homogeneous tau_m."""
    if m not in _STRUCTURE:
        raise ValueError("closed forms are available for m = 1, 2, 3")
    vals = _entries(lam)
    return [(name, vals[name], deg, blocks) for name, deg, blocks in _STRUCTURE[m]]


def analytic_eigenvalues(m, lam):
    """All 4^m eigenvalues with multiplicity."""
    return np.array([v for _, v, deg, _ in analytic_spectrum(m, lam) for _ in range(deg)])
