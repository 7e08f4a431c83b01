import numpy as np
import pytest

from ahlab.tensors import TensorError, part0220, part11, sym2
from ahlab.symbols import (
    OPERATOR_IDS,
    SymbolProbe,
    ak_constraint_projector,
    ak_traced_identities,
    constrain_deformation,
    ellipticity_certificate,
    hermitian_certificate_residual,
    hermitian_symbol_certificate,
    j_certificate_residual,
    metric_certificate_residual,
    operator_symbol_consistency,
    random_orthonormal_J,
    random_probe,
    symbol_D2J,
    symbol_Rm,
    symbol_catalog,
)


def test_probe_validation():
    with pytest.raises(TensorError):
        SymbolProbe(J=np.eye(4), xi=np.ones(4), h=np.zeros((4, 4)), K=np.zeros((4, 4)))


def test_symbol_rm_symmetries():
    rng = np.random.default_rng(0)
    p = random_probe(4, rng)
    sr = symbol_Rm(p)
    assert np.abs(sr + np.einsum("ijkl->jikl", sr)).max() < 1e-14
    assert np.abs(sr - np.einsum("ijkl->klij", sr)).max() < 1e-14
    first = sr + np.einsum("ijkl->jkil", sr) + np.einsum("ijkl->kijl", sr)
    assert np.abs(first).max() < 1e-14


def test_symbol_d2j_trace_is_lapj_symbol():
    rng = np.random.default_rng(1)
    p = random_probe(4, rng)
    sd = symbol_D2J(p)
    assert np.abs(np.einsum("iiab->ab", sd) - symbol_catalog("lapJ", p)).max() < 1e-13


@pytest.mark.parametrize("dim", (4, 6))
def test_ellipticity_certificates(dim):
    cert = ellipticity_certificate(seed=0, trials=50, dim=dim)
    assert cert["metric"] < 1e-12
    assert cert["J"] < 1e-12


@pytest.mark.parametrize("dim", (4, 6))
def test_hermitian_certificate(dim):
    cert = hermitian_symbol_certificate(seed=1, trials=50, dim=dim)
    assert cert["residual"] < 1e-12


def test_hermitian_certificate_rejects_bad_probe():
    rng = np.random.default_rng(2)
    p = random_probe(4, rng)  # generic K != 0
    with pytest.raises(TensorError):
        hermitian_certificate_residual(p)


def test_trivial_probe_h_equals_identity():
    """h = g = Id, K = 0 satisfies the metric certificate exactly."""
    rng = np.random.default_rng(3)
    J = random_orthonormal_J(4, rng)
    xi = rng.normal(size=4)
    p = SymbolProbe(J=J, xi=xi, h=np.eye(4), K=np.zeros((4, 4)))
    assert metric_certificate_residual(p) < 1e-13
    assert j_certificate_residual(p) < 1e-13


def test_constrained_probe_structure():
    rng = np.random.default_rng(4)
    p = random_probe(4, rng, constrained=True)
    assert np.abs(p.h - p.h.T).max() < 1e-14
    assert np.abs(part11(p.K, p.J)).max() < 1e-14
    # K^sym = J h^(0,2)+(2,0) coupling used by the certificates
    assert np.abs(sym2(p.K) - p.J @ part0220(sym2(p.h), p.J)).max() < 1e-13


@pytest.mark.parametrize("dim", (4, 6))
def test_ak_projector_idempotent_and_identities(dim):
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = random_probe(dim, rng, constrained=False)
        q = ak_constraint_projector(p)
        q2 = ak_constraint_projector(q)
        assert np.abs(q.h - q2.h).max() < 1e-12
        assert np.abs(q.K - q2.K).max() < 1e-12
        assert np.abs(q.h).max() > 1e-3  # projection is not the zero map
        rep = ak_traced_identities(q)
        assert max(rep.values()) < 1e-12, rep


def test_ak_projector_output_is_admissible():
    rng = np.random.default_rng(6)
    p = random_probe(4, rng, constrained=False)
    q = ak_constraint_projector(p)
    J, xi, h, K = q.J, q.xi, q.h, q.K
    assert np.abs(h - h.T).max() < 1e-12
    assert np.abs(part11(K, J)).max() < 1e-12
    # cyclic constraint: sum over cyclic permutations of
    # xi_i K_jk + h(k, Jj) xi_i
    n = 4
    for i in range(n):
        for j in range(n):
            for k in range(n):
                r = (xi[i] * K[j, k] + xi[j] * K[k, i] + xi[k] * K[i, j]
                     + h[k] @ J[:, j] * xi[i] + h[i] @ J[:, k] * xi[j]
                     + h[j] @ J[:, i] * xi[k])
                assert abs(r) < 1e-12


@pytest.mark.parametrize("op_id", OPERATOR_IDS)
def test_catalog_symbols_match_operators(op_id):
    """Each catalog symbol equals the exact linearization of its operator in
    the second derivatives of (g, J) at a flat almost Kahler origin."""
    for seed in (0, 1):
        assert operator_symbol_consistency(op_id, seed=seed) < 1e-12, (op_id, seed)
