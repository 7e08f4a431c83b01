import numpy as np
import pytest

from ahlab.tensors import TensorError
from ahlab.structures import (
    BUILTIN_NAMES,
    MatrixJet,
    builtin,
    compatibilize,
    fd_adapter,
    jet_consistency_check,
    provider_values,
    random_point_structure,
    sample_points,
    standard_J,
)
from ahlab.riemann import domega_norm, levi_civita, nijenhuis_norm


def test_builtin_names_and_dispatch():
    for name in BUILTIN_NAMES:
        prov = builtin(name)
        x = sample_points(name, 1, seed=1)[0]
        jet = prov.jet_at(x)
        n = len(jet.g)
        assert np.abs(jet.J @ jet.J + np.eye(n)).max() < 1e-12
        assert np.abs(jet.J.T @ jet.g @ jet.J - jet.g).max() < 1e-12
        assert np.linalg.eigvalsh(jet.g).min() > 0
    with pytest.raises(TensorError):
        builtin("no-such-structure")
    with pytest.raises(TensorError):
        builtin("flat-torus", dim=5)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_declared_jets_match_finite_differences(name):
    prov = builtin(name)
    for x in sample_points(name, 2, seed=3):
        report = jet_consistency_check(prov, x)
        assert report["max"] < 5e-6, (name, report)


def test_settings_are_honest():
    """Each built-in satisfies exactly the conditions its setting claims."""
    cases = {
        "flat-torus": (True, True),          # (d omega = 0, N_J = 0)
        "kodaira-thurston": (True, False),
        "symplectic-torus": (True, False),
        "hopf-surface": (False, True),
        "hermitian-torus": (False, True),
        "perturbed-torus": (False, False),
    }
    for name, (closed, integrable) in cases.items():
        x = sample_points(name, 1, seed=5)[0]
        pkg = levi_civita(builtin(name).jet_at(x))
        assert (domega_norm(pkg) < 1e-12) == closed, name
        assert (nijenhuis_norm(pkg) < 1e-12) == integrable, name


def test_hopf_chart_excludes_origin():
    with pytest.raises(TensorError):
        builtin("hopf-surface").jet_at(np.zeros(4))


def test_compatibilize_produces_compatible_metric():
    rng = np.random.default_rng(0)
    J = random_point_structure(4, 4).J
    h = np.eye(4) + 0.3 * (lambda m: m @ m.T)(rng.normal(size=(4, 4)))
    g = compatibilize(h, J)
    assert np.abs(J.T @ g @ J - g).max() < 1e-12
    assert np.linalg.eigvalsh(g).min() > 0


def test_matrix_jet_algebra_against_fd():
    """Product/inverse jets of MatrixJet agree with finite differences."""
    def mat(x):
        n = len(x)
        out = np.eye(n) + 0.1 * np.sin(np.add.outer(x, 2 * x))
        return out

    def jet_of(x, step=1e-4):
        n = len(x)
        v = mat(x)
        d = np.zeros((n, n, n))
        dd = np.zeros((n, n, n, n))
        for c in range(n):
            e = np.zeros(n); e[c] = step
            d[c] = (mat(x + e) - mat(x - e)) / (2 * step)
            dd[c, c] = (mat(x + e) - 2 * v + mat(x - e)) / step**2
        for c in range(n):
            for dx in range(c + 1, n):
                ec = np.zeros(n); ec[c] = step
                ed = np.zeros(n); ed[dx] = step
                m = (mat(x + ec + ed) - mat(x + ec - ed)
                     - mat(x - ec + ed) + mat(x - ec - ed)) / (4 * step**2)
                dd[c, dx] = dd[dx, c] = m
        return MatrixJet(v, d, dd)

    x = np.array([0.2, -0.1, 0.3, 0.15])
    A = jet_of(x)
    P = A @ A.T
    Q = A.inv()

    def fd_check(jetfun, jet):
        step = 1e-4
        e = np.zeros(4); e[1] = step
        d_fd = (jetfun(x + e) - jetfun(x - e)) / (2 * step)
        assert np.abs(jet.d[1] - d_fd).max() < 1e-6

    fd_check(lambda y: mat(y) @ mat(y).T, P)
    fd_check(lambda y: np.linalg.inv(mat(y)), Q)
    assert np.abs((A @ Q).v - np.eye(4)).max() < 1e-12


def test_fd_adapter_validation():
    prov = builtin("flat-torus")
    with pytest.raises(TensorError):
        fd_adapter(provider_values(prov), step=0.0)
    with pytest.warns(UserWarning):
        fd_adapter(provider_values(prov), step=1e-8)


def test_random_point_structure_deterministic():
    a = random_point_structure(11, 6)
    b = random_point_structure(11, 6)
    assert np.array_equal(a.g, b.g) and np.array_equal(a.J, b.J)
    assert a.dim == 6
