import numpy as np
import pytest

from ahlab.structures import builtin, sample_points
from ahlab.riemann import levi_civita


@pytest.fixture(scope="session")
def providers():
    return {name: builtin(name) for name in (
        "flat-torus", "perturbed-torus", "kodaira-thurston",
        "hopf-surface", "hermitian-torus", "symplectic-torus",
    )}


@pytest.fixture(scope="session")
def packages(providers):
    """One Levi-Civita package per built-in at a generic sample point."""
    out = {}
    for name, prov in providers.items():
        x = sample_points(name, 1, seed=7)[0]
        out[name] = levi_civita(prov.jet_at(x))
    return out


def points_for(name, count=5, seed=0):
    return sample_points(name, count, seed)
