import dataclasses

import numpy as np
import pytest

from ahlab.tensors import TensorError, part0220, part11
from ahlab.structures import builtin, sample_points
from ahlab.riemann import levi_civita
from ahlab.classify import (
    ak_d2j_trace_residual,
    ak_reductions,
    ak_scalar_identity,
    classified,
    dim4_ak_checks,
    hermitian_reductions,
    lapj_n_residuals,
    parity_audit,
    property_audit,
)

ALL = ("flat-torus", "perturbed-torus", "kodaira-thurston",
       "hopf-surface", "hermitian-torus", "symplectic-torus")


def _pkg(name, seed=0, **params):
    prov = builtin(name, **params)
    x = sample_points(name, 1, seed)[0]
    return levi_civita(prov.jet_at(x))


@pytest.mark.parametrize("name", ALL)
def test_property_table(name):
    pkg = _pkg(name, seed=1)
    ct = classified(pkg)
    rep = property_audit(ct, pkg.jet.g, pkg.jet.J, pkg.jet.setting)
    assert bool(rep.pop("ok")), rep
    assert rep.pop("B8_transpose") < 1e-12
    for entry in rep.values():
        assert max(entry.values()) < 1e-12


@pytest.mark.parametrize("name", ALL)
def test_lapj_plus_N_identities(name):
    pkg = _pkg(name, seed=2)
    ct = classified(pkg)
    rep = lapj_n_residuals(ct, pkg.jet.g, pkg.jet.J)
    assert rep["lapJ11_plus_N"] < 1e-12
    assert rep["lapJ_plus_N_type"] < 1e-12


@pytest.mark.parametrize("name", ("kodaira-thurston", "symplectic-torus"))
def test_ak_reductions(name):
    pkg = _pkg(name, seed=3)
    ct = classified(pkg)
    rep = ak_reductions(ct)
    assert max(rep.values()) < 1e-12, rep
    assert ak_scalar_identity(pkg, ct) < 1e-12
    assert ak_d2j_trace_residual(pkg) < 1e-12


def test_ak_reductions_wrong_setting_rejected():
    ct = classified(_pkg("hopf-surface"))
    with pytest.raises(TensorError):
        ak_reductions(ct, setting="Hermitian")


@pytest.mark.parametrize("name", ("kodaira-thurston", "symplectic-torus"))
def test_dim4_ak_structure(name):
    pkg = _pkg(name, seed=4)
    ct = classified(pkg)
    rep = dim4_ak_checks(ct, pkg.jet.g)
    assert rep["B2_quarter_E1_g"] < 1e-12
    assert rep["B1_spectrum"] < 1e-12
    assert rep["half_B1_minus_B2_max_eig"] < 1e-12  # negative semidefinite


@pytest.mark.parametrize("name", ("hopf-surface", "hermitian-torus"))
def test_hermitian_reductions(name):
    ct = classified(_pkg(name, seed=5))
    rep = hermitian_reductions(ct)
    assert max(rep.values()) < 1e-12, rep


def test_hermitian_reductions_in_dim6():
    prov = builtin("hermitian-torus", dim=6)
    pkg = levi_civita(prov.jet_at(np.array([0.2, -0.1, 0.3, 0.05, -0.2, 0.15])))
    rep = hermitian_reductions(classified(pkg))
    assert max(rep.values()) < 1e-12, rep


def test_e_scalars_positive_and_related():
    pkg = _pkg("perturbed-torus", seed=6)
    ct = classified(pkg)
    # E1 = |DJ|^2 directly
    E1 = np.einsum("ab,cd,ef,ace,bdf", pkg.gi, pkg.gi, pkg.gi, pkg.DJ, pkg.DJ)
    assert abs(ct.E[0] - E1) < 1e-12
    assert ct.E[0] > 0
    assert ct.E[2] >= 0  # |theta-vector|^2
    # B traces recover E scalars: tr_g B1 = E1, tr_g B2 = E1 (by symmetry of slots)
    tr = lambda T: float(np.einsum("ab,ab", pkg.gi, T))
    assert abs(tr(ct.B[0]) - ct.E[0]) < 1e-12
    assert abs(tr(ct.B[2]) - ct.E[1]) < 1e-12
    assert abs(tr(ct.B[4]) - ct.E[2]) < 1e-12


def test_parity_audit():
    prov = builtin("perturbed-torus")
    x = np.array([0.2, 0.3, -0.1, 0.05])
    jet = prov.jet_at(x)
    pkg_plus = levi_civita(jet)
    pkg_minus = levi_civita(
        dataclasses.replace(jet, J=-jet.J, dJ=-jet.dJ, ddJ=-jet.ddJ)
    )
    rep = parity_audit(pkg_plus, pkg_minus)
    assert max(rep.values()) < 1e-12, rep


def test_scaling_g_to_4g():
    """g -> 4g fixes Ric and scales the Laplacian of J (as an endomorphism,
    i.e. the lowered lapJ divided by g) by 1/4; E1 also scales by 1/4."""
    prov = builtin("perturbed-torus")
    x = np.array([0.15, -0.25, 0.1, 0.2])
    jet = prov.jet_at(x)
    pkg = levi_civita(jet)
    jet4 = dataclasses.replace(jet, g=4 * jet.g, dg=4 * jet.dg, ddg=4 * jet.ddg)
    pkg4 = levi_civita(jet4)
    assert np.abs(pkg4.Ric - pkg.Ric).max() < 1e-12
    ct, ct4 = classified(pkg), classified(pkg4)
    lap_m = np.linalg.inv(jet.g) @ ct.lapJ.T
    lap4_m = np.linalg.inv(jet4.g) @ ct4.lapJ.T
    assert np.abs(lap4_m - 0.25 * lap_m).max() < 1e-12
    assert abs(ct4.E[0] - 0.25 * ct.E[0]) < 1e-12
