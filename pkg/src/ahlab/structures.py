"""Almost Hermitian structures as 2-jets at chart points.

A provider returns, at a chart point x, the values and first and second
coordinate derivatives of (g, J).  Built-in model geometries carry exact
analytic jets; an adapter builds jets by finite differences from a
value-only callable.  Derivative slots come first: dg[c, a, b] is
d_c g_{ab} and ddg[c, d, a, b] is d_c d_d g_{ab}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .tensors import PointStructure, TensorError, check_spd, rel_norm

SETTINGS = ("generic", "almostKahler", "Hermitian", "Kahler")


@dataclass(frozen=True)
class StructureJet:
    """Metric, almost complex structure, and their 2-jets at a chart point."""

    x: np.ndarray
    g: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray
    J: np.ndarray
    dJ: np.ndarray
    ddJ: np.ndarray
    setting: str = "generic"

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def validate(self, tol: float = 1e-9) -> PointStructure:
        ps = PointStructure(self.g, self.J, tol=tol)
        n = self.dim
        if rel_norm(self.ddg - self.ddg.transpose(1, 0, 2, 3), self.ddg + np.eye(n)) > tol:
            raise TensorError("ddg not symmetric in derivative slots")
        if rel_norm(self.ddJ - self.ddJ.transpose(1, 0, 2, 3), self.ddJ + np.eye(n)) > tol:
            raise TensorError("ddJ not symmetric in derivative slots")
        return ps


@dataclass(frozen=True)
class StructureProvider:
    name: str
    setting: str
    jet_at: Callable[[np.ndarray], StructureJet]
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# 2-jets of matrix fields: (value, d, dd) triples with product-rule algebra.
# Shapes: value [n, n], d [c, n, n], dd [c, d, n, n].


@dataclass(frozen=True)
class MatrixJet:
    v: np.ndarray
    d: np.ndarray
    dd: np.ndarray

    @staticmethod
    def constant(M: np.ndarray, dim_x: int) -> "MatrixJet":
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        return MatrixJet(M, np.zeros((dim_x, n, n)), np.zeros((dim_x, dim_x, n, n)))

    def __add__(self, other: "MatrixJet") -> "MatrixJet":
        return MatrixJet(self.v + other.v, self.d + other.d, self.dd + other.dd)

    def __sub__(self, other: "MatrixJet") -> "MatrixJet":
        return MatrixJet(self.v - other.v, self.d - other.d, self.dd - other.dd)

    def scale(self, a: float) -> "MatrixJet":
        return MatrixJet(a * self.v, a * self.d, a * self.dd)

    @property
    def T(self) -> "MatrixJet":
        return MatrixJet(
            self.v.T, self.d.transpose(0, 2, 1), self.dd.transpose(0, 1, 3, 2)
        )

    def __matmul__(self, other: "MatrixJet") -> "MatrixJet":
        v = self.v @ other.v
        d = np.einsum("cij,jk->cik", self.d, other.v) + np.einsum(
            "ij,cjk->cik", self.v, other.d
        )
        dd = (
            np.einsum("cdij,jk->cdik", self.dd, other.v)
            + np.einsum("cij,djk->cdik", self.d, other.d)
            + np.einsum("dij,cjk->cdik", self.d, other.d)
            + np.einsum("ij,cdjk->cdik", self.v, other.dd)
        )
        return MatrixJet(v, d, dd)

    def inv(self) -> "MatrixJet":
        w = np.linalg.inv(self.v)
        dw = -np.einsum("ij,cjk,kl->cil", w, self.d, w)
        ddw = (
            -np.einsum("dij,cjk,kl->cdil", dw, self.d, w)
            - np.einsum("ij,cdjk,kl->cdil", w, self.dd, w)
            - np.einsum("ij,cjk,dkl->cdil", w, self.d, dw)
        )
        return MatrixJet(w, dw, ddw)


def _jet_from_matrices(x, gj: MatrixJet, Jj: MatrixJet, setting: str) -> StructureJet:
    return StructureJet(
        x=np.asarray(x, dtype=float),
        g=gj.v, dg=gj.d, ddg=gj.dd,
        J=Jj.v, dJ=Jj.d, ddJ=Jj.dd,
        setting=setting,
    )


def standard_J(dim: int) -> np.ndarray:
    """Block-diagonal J0 with J0 e_{2i} = e_{2i+1}."""
    J = np.zeros((dim, dim))
    for i in range(0, dim, 2):
        J[i + 1, i] = 1.0
        J[i, i + 1] = -1.0
    return J


def compatibilize(h: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Average an SPD h into an exactly J-compatible metric (1/2)(h + h(J.,J.))."""
    check_spd(h)
    n = h.shape[0]
    if rel_norm(J @ J + np.eye(n), np.eye(n)) > 1e-9:
        raise TensorError("J*J != -Id")
    return 0.5 * (h + J.T @ h @ J)


def _compatibilize_jet(h: MatrixJet, J: MatrixJet) -> MatrixJet:
    return (h + J.T @ h @ J).scale(0.5)


# ---------------------------------------------------------------------------
# built-in model geometries


def _flat_torus(dim: int) -> StructureProvider:
    g0 = np.eye(dim)
    J0 = standard_J(dim)

    def jet_at(x):
        x = np.asarray(x, dtype=float)
        return _jet_from_matrices(
            x, MatrixJet.constant(g0, dim), MatrixJet.constant(J0, dim), "Kahler"
        )

    return StructureProvider("flat-torus", "Kahler", jet_at, {"dim": dim})


def _kt_coframe(x: np.ndarray) -> MatrixJet:
    """Invariant coframe {dx, dy, dz - x dy, dt} as a matrix 2-jet, rows = eta^i."""
    C = np.eye(4)
    C[2, 1] = -x[0]
    dC = np.zeros((4, 4, 4))
    dC[0, 2, 1] = -1.0
    return MatrixJet(C, dC, np.zeros((4, 4, 4, 4)))


_KT_JFRAME = np.zeros((4, 4))
# pair e1 <-> e3 and e2 <-> e4 in the invariant frame so that
# omega = eta^1 ^ eta^3 + eta^2 ^ eta^4 is closed (d eta^3 = -eta^1 ^ eta^2)
_KT_JFRAME[2, 0] = 1.0
_KT_JFRAME[0, 2] = -1.0
_KT_JFRAME[3, 1] = 1.0
_KT_JFRAME[1, 3] = -1.0


def _invariant_jet(
    x, coframe: Callable[[np.ndarray], MatrixJet], G: np.ndarray, Jf: np.ndarray, setting: str
) -> StructureJet:
    """Jets of g = C^T G C and J = C^-1 Jf C for frame-constant (G, Jf)."""
    x = np.asarray(x, dtype=float)
    C = coframe(x)
    n = C.v.shape[0]
    Gj = MatrixJet.constant(G, n)
    Jfj = MatrixJet.constant(Jf, n)
    gj = C.T @ Gj @ C
    Jj = C.inv() @ Jfj @ C
    return _jet_from_matrices(x, gj, Jj, setting)


def _kodaira_thurston(G=None, Jf=None) -> StructureProvider:
    G = np.eye(4) if G is None else np.asarray(G, dtype=float)
    Jf = _KT_JFRAME if Jf is None else np.asarray(Jf, dtype=float)

    def jet_at(x):
        return _invariant_jet(x, _kt_coframe, G, Jf, "almostKahler")

    return StructureProvider("kodaira-thurston", "almostKahler", jet_at, {})


def _hopf_coframe(x: np.ndarray) -> MatrixJet:
    """Coframe dx^i / r on R^4 minus the origin."""
    r2 = float(x @ x)
    if r2 < 1e-12:
        raise TensorError("hopf-surface chart excludes the origin")
    r = np.sqrt(r2)
    I = np.eye(4)
    C = I / r
    dr_inv = -x / r**3  # d_c r^-1
    dC = np.einsum("c,ij->cij", dr_inv, I)
    ddr_inv = -np.eye(4) / r**3 + 3.0 * np.outer(x, x) / r**5
    ddC = np.einsum("cd,ij->cdij", ddr_inv, I)
    return MatrixJet(C, dC, ddC)


def _hopf_surface(G=None, Jf=None) -> StructureProvider:
    G = np.eye(4) if G is None else np.asarray(G, dtype=float)
    Jf = standard_J(4) if Jf is None else np.asarray(Jf, dtype=float)

    def jet_at(x):
        return _invariant_jet(x, _hopf_coframe, G, Jf, "Hermitian")

    return StructureProvider("hopf-surface", "Hermitian", jet_at, {})


def _trig_sym_jet(x: np.ndarray, eps: float) -> MatrixJet:
    """SPD perturbation delta_ab + eps*(sin(x_a + x_b) + cos x_a cos x_b)."""
    n = len(x)
    s = np.sin(np.add.outer(x, x))
    c = np.cos(x)
    v = np.eye(n) + eps * (s + np.outer(c, c))
    cc = np.cos(np.add.outer(x, x))
    sx = np.sin(x)
    d = np.zeros((n, n, n))
    dd = np.zeros((n, n, n, n))
    I = np.eye(n)
    # d_c sin(x_a + x_b) = cos(x_a + x_b) (delta_ca + delta_cb)
    d += eps * np.einsum("ab,ca->cab", cc, I)
    d += eps * np.einsum("ab,cb->cab", cc, I)
    # d_c (cos x_a cos x_b) = -sin x_a cos x_b delta_ca - cos x_a sin x_b delta_cb
    d -= eps * np.einsum("a,b,ca->cab", sx, c, I)
    d -= eps * np.einsum("a,b,cb->cab", c, sx, I)
    dd -= eps * np.einsum("ab,ca,da->cdab", s, I, I)
    dd -= eps * np.einsum("ab,ca,db->cdab", s, I, I)
    dd -= eps * np.einsum("ab,cb,da->cdab", s, I, I)
    dd -= eps * np.einsum("ab,cb,db->cdab", s, I, I)
    dd -= eps * np.einsum("a,b,ca,da->cdab", c, c, I, I)
    dd += eps * np.einsum("a,b,ca,db->cdab", sx, sx, I, I)
    dd += eps * np.einsum("a,b,cb,da->cdab", sx, sx, I, I)
    dd -= eps * np.einsum("a,b,cb,db->cdab", c, c, I, I)
    return MatrixJet(v, d, dd)


def _trig_conjugator_jet(x: np.ndarray, eps: float) -> MatrixJet:
    """Invertible M(x) = Id + eps * R(x), R_ab = cos(x_{(a+b) mod n} + 0.7a + b)."""
    n = len(x)
    v = np.zeros((n, n))
    d = np.zeros((n, n, n))
    dd = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            k = (a + b) % n
            t = x[k] + 0.7 * a + b
            v[a, b] = np.cos(t)
            d[k, a, b] = -np.sin(t)
            dd[k, k, a, b] = -np.cos(t)
    return MatrixJet(np.eye(n) + eps * v, eps * d, eps * dd)


def _perturbed_torus(dim: int, eps: float) -> StructureProvider:
    if eps < 0:
        raise TensorError("eps must be nonnegative")
    J0 = standard_J(dim)

    def jet_at(x):
        x = np.asarray(x, dtype=float)
        h = _trig_sym_jet(x, eps)
        M = _trig_conjugator_jet(x, 0.5 * eps)
        Jj = M @ MatrixJet.constant(J0, dim) @ M.inv()
        gj = _compatibilize_jet(h, Jj)
        jet = _jet_from_matrices(x, gj, Jj, "generic")
        check_spd(jet.g)  # detects eps so large that positivity is lost
        return jet

    return StructureProvider("perturbed-torus", "generic", jet_at, {"dim": dim, "eps": eps})


def _symplectic_torus(dim: int, eps: float) -> StructureProvider:
    """Constant symplectic form with a varying compatible J: generic almost Kahler.

    J = M J0 M^{-1} with M the Cayley transform of the Hamiltonian field
    X = J0 S (S symmetric), so M is symplectic for omega0 = g0(J0 ., .) and
    d(omega) = 0 holds exactly; the metric is recovered as g = -J^T omega0.
    """
    if eps < 0:
        raise TensorError("eps must be nonnegative")
    J0 = standard_J(dim)
    Om = J0.T  # omega0 with g0 = identity
    I = np.eye(dim)

    def jet_at(x):
        x = np.asarray(x, dtype=float)
        dI = MatrixJet.constant(I, dim)
        S = _trig_sym_jet(x, eps) - dI
        X = MatrixJet.constant(J0, dim) @ S
        M = (dI - X) @ (dI + X).inv()
        Jj = M @ MatrixJet.constant(J0, dim) @ M.inv()
        gj = (Jj.T @ MatrixJet.constant(Om, dim)).scale(-1.0)
        jet = _jet_from_matrices(x, gj, Jj, "almostKahler")
        check_spd(jet.g)
        return jet

    return StructureProvider("symplectic-torus", "almostKahler", jet_at, {"dim": dim, "eps": eps})


def _hermitian_torus(dim: int, eps: float) -> StructureProvider:
    """Constant standard J with a non-flat compatible metric: integrable, dω != 0."""
    if eps < 0:
        raise TensorError("eps must be nonnegative")
    J0 = standard_J(dim)

    def jet_at(x):
        x = np.asarray(x, dtype=float)
        gj = _compatibilize_jet(_trig_sym_jet(x, eps), MatrixJet.constant(J0, dim))
        jet = _jet_from_matrices(x, gj, MatrixJet.constant(J0, dim), "Hermitian")
        check_spd(jet.g)
        return jet

    return StructureProvider("hermitian-torus", "Hermitian", jet_at, {"dim": dim, "eps": eps})


def builtin(name: str, **params) -> StructureProvider:
    """Construct a built-in model geometry by name."""
    if name == "flat-torus":
        dim = int(params.get("dim", 4))
        if dim % 2:
            raise TensorError("dimension must be even")
        return _flat_torus(dim)
    if name == "perturbed-torus":
        dim = int(params.get("dim", 4))
        if dim % 2:
            raise TensorError("dimension must be even")
        return _perturbed_torus(dim, float(params.get("eps", 0.1)))
    if name == "kodaira-thurston":
        return _kodaira_thurston(params.get("G"), params.get("Jf"))
    if name == "hopf-surface":
        return _hopf_surface(params.get("G"), params.get("Jf"))
    if name == "hermitian-torus":
        dim = int(params.get("dim", 4))
        if dim % 2:
            raise TensorError("dimension must be even")
        return _hermitian_torus(dim, float(params.get("eps", 0.15)))
    if name == "symplectic-torus":
        dim = int(params.get("dim", 4))
        if dim % 2:
            raise TensorError("dimension must be even")
        return _symplectic_torus(dim, float(params.get("eps", 0.1)))
    raise TensorError(f"unknown structure {name!r}")


BUILTIN_NAMES = (
    "flat-torus",
    "perturbed-torus",
    "kodaira-thurston",
    "hopf-surface",
    "hermitian-torus",
    "symplectic-torus",
)


# ---------------------------------------------------------------------------
# finite-difference adapter


_FD1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0  # offsets -2..2
_FD2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def fd_adapter(
    values: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    step: float = 1e-4,
    setting: str = "generic",
) -> StructureProvider:
    """Provider whose derivatives come from 5-point central differences."""
    if step <= 0:
        raise TensorError("step must be positive")
    if step < 1e-6:
        import warnings

        warnings.warn("fd_adapter step below 1e-6: rounding may dominate truncation")

    def jet_at(x):
        x = np.asarray(x, dtype=float)
        g0, J0 = (np.asarray(a, dtype=float) for a in values(x))
        n = len(x)
        dg = np.zeros((n,) + g0.shape)
        dJ = np.zeros((n,) + J0.shape)
        ddg = np.zeros((n, n) + g0.shape)
        ddJ = np.zeros((n, n) + J0.shape)
        samples = {}

        def val(offsets):
            key = tuple(offsets)
            if key not in samples:
                samples[key] = tuple(
                    np.asarray(a, dtype=float) for a in values(x + step * np.array(offsets))
                )
            return samples[key]

        for c in range(n):
            gs, Js = [], []
            for o in (-2, -1, 0, 1, 2):
                off = [0] * n
                off[c] = o
                gv, Jv = val(off)
                gs.append(gv)
                Js.append(Jv)
            dg[c] = sum(w * a for w, a in zip(_FD1, gs)) / step
            dJ[c] = sum(w * a for w, a in zip(_FD1, Js)) / step
            ddg[c, c] = sum(w * a for w, a in zip(_FD2, gs)) / step**2
            ddJ[c, c] = sum(w * a for w, a in zip(_FD2, Js)) / step**2
        for c in range(n):
            for d in range(c + 1, n):
                acc_g = np.zeros_like(g0)
                acc_J = np.zeros_like(J0)
                for sc in (1, -1):
                    for sd in (1, -1):
                        off = [0] * n
                        off[c] = sc
                        off[d] = sd
                        gv, Jv = val(off)
                        acc_g += sc * sd * gv
                        acc_J += sc * sd * Jv
                ddg[c, d] = ddg[d, c] = acc_g / (4 * step**2)
                ddJ[c, d] = ddJ[d, c] = acc_J / (4 * step**2)
        return StructureJet(x, g0, dg, ddg, J0, dJ, ddJ, setting)

    return StructureProvider("fd-adapter", setting, jet_at, {"step": step})


def provider_values(p: StructureProvider) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Value-only view of a provider, for feeding fd_adapter."""

    def values(x):
        jet = p.jet_at(x)
        return jet.g, jet.J

    return values


def jet_consistency_check(p: StructureProvider, x, step: float = 1e-4) -> dict:
    """Compare declared derivatives against finite differences of declared values."""
    jet = p.jet_at(np.asarray(x, dtype=float))
    fd = fd_adapter(provider_values(p), step=step, setting=p.setting).jet_at(x)

    def res(a, b):
        return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), 1.0))

    report = {
        "dg": res(jet.dg, fd.dg),
        "ddg": res(jet.ddg, fd.ddg),
        "dJ": res(jet.dJ, fd.dJ),
        "ddJ": res(jet.ddJ, fd.ddJ),
    }
    report["max"] = max(report.values())
    return report


# ---------------------------------------------------------------------------
# deterministic random structures


def random_point_structure(seed: int, dim: int) -> PointStructure:
    """Deterministic random compatible (g, J) at a point."""
    if dim % 2:
        raise TensorError("dimension must be even")
    rng = np.random.default_rng(seed)
    B = np.eye(dim) + 0.3 * rng.standard_normal((dim, dim))
    while abs(np.linalg.det(B)) < 1e-3:
        B = np.eye(dim) + 0.3 * rng.standard_normal((dim, dim))
    J = B @ standard_J(dim) @ np.linalg.inv(B)
    A = 0.3 * rng.standard_normal((dim, dim))
    h = np.eye(dim) + A @ A.T
    g = compatibilize(h, J)
    return PointStructure(g, J, tol=1e-9)


def sample_points(provider_name: str, count: int, seed: int = 0) -> np.ndarray:
    """Pseudo-random chart points appropriate for a built-in geometry."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-0.4, 0.4, size=(count, 4))
    if provider_name == "hopf-surface":
        pts = pts * 0.5
        pts[:, 0] += 1.0  # stay away from the excluded origin
    return pts
