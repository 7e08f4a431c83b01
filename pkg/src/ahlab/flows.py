"""Geometric flow right-hand sides and homogeneous ODE integration.

Deformations of an almost Hermitian structure are handled as a pair of
covariant 2-tensors (h, K) with h = dg/dt and K the lowered dJ/dt, together
with the induced form deformation eta = d(omega)/dt = (J^T) h + K.  The
three flow families share this representation:

* AHCF: h = -2 Ric + a L_{theta#} g + Q1, K = lapJ + N + R' + a L_{theta#} J + Q2,
  where (Q1, Q2) are coefficient combinations of the classified DJ*DJ tensors.
* SCF (almost Kahler): eta = P (the Chern-Ricci form), K = lapJ + N + R',
  with h reconstructed from (eta, K).
* HCF (Hermitian): eta = S + lower-order DJ*DJ corrections, K = 0.

Homogeneous built-ins (flat torus, the nilmanifold, the Hopf surface) have
frame-constant structures, so each flow reduces to an ODE on the frame
matrices (G, Jf); ``integrate_homogeneous`` steps that ODE with classical
fixed-step RK4 and records invariant monitors along the trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensors import (
    TensorError,
    compose_J,
    omega_of,
    part0220,
    part11,
    raise_endo,
    rel_norm,
    skew2,
    sym2,
)
from .structures import (
    MatrixJet,
    StructureProvider,
    _invariant_jet,
    _hopf_coframe,
    _kt_coframe,
    builtin,
)
from .riemann import (
    LCPackage,
    domega_norm,
    gauge_fields,
    levi_civita,
    lie_derivative_g,
    lie_derivative_J,
    nijenhuis_norm,
)
from .classify import ClassifiedTensors, classified
from .chern import ChernPackage, chern_connection

# Sign conventions for the SCF consistency identities, resolved once by
# evaluating both options on a generic almost Kahler structure (the
# symplectic torus; the nilmanifold is Chern-Ricci flat, so every option
# vanishes there) and freezing the vanishing choice:
#   eta = SCF_ETA_SIGN * P
#   part0220(eta) = SCF_SKEW_SIGN * (lapJ + N)
#   h^(1,1)       = -2 Ric^(1,1) + SCF_LOT_SIGN * (B1/2 - B2)
SCF_ETA_SIGN = 1.0
SCF_SKEW_SIGN = 1.0
SCF_LOT_SIGN = 1.0

# Coefficient bases for the AHCF corrections.  Q1 ranges over the symmetric
# even-type combinations and Q2 over odd-type combinations B^i J and E^i omega
# (the E^i omega entries are (1,1), so admissible Q2 vectors must not use
# them; validation reports the violation rather than silently projecting).
Q1_BASIS = ("B1", "B2", "B3", "B5", "B4sym", "B6sym", "B8sym",
            "E1 g", "E2 g", "E3 g", "E4 g")
Q2_BASIS = tuple(f"B{i} J" for i in range(1, 11)) + tuple(
    f"E{i} omega" for i in range(1, 5)
)


@dataclass(frozen=True)
class FlowSpec:
    """Flow family and its coefficients."""

    family: str = "SCF"
    a: float = 0.0
    q1: tuple[float, ...] = field(default_factory=lambda: (0.0,) * len(Q1_BASIS))
    q2: tuple[float, ...] = field(default_factory=lambda: (0.0,) * len(Q2_BASIS))
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0

    def __post_init__(self):
        if self.family not in ("AHCF", "SCF", "HCF"):
            raise TensorError(f"unknown flow family {self.family!r}")
        if len(self.q1) != len(Q1_BASIS):
            raise TensorError(f"q1 must have {len(Q1_BASIS)} coefficients")
        if len(self.q2) != len(Q2_BASIS):
            raise TensorError(f"q2 must have {len(Q2_BASIS)} coefficients")


@dataclass
class FlowState:
    """Frame matrices of a homogeneous structure at time t."""

    t: float
    G: np.ndarray
    Jf: np.ndarray


# ---------------------------------------------------------------------------
# deformation conditions


def validate_deformation(h: np.ndarray, K: np.ndarray, g: np.ndarray,
                         J: np.ndarray) -> dict:
    """Residuals of the five conditions a genuine deformation (h, K) obeys.

    eta = (J^T) h + K is the induced derivative of omega; the conditions are
    h symmetric, K of type (0,2)+(2,0), K^{sym} J = h^{(0,2)+(2,0)},
    eta^{(0,2)+(2,0)} = K^{skew}, and eta^{(1,1)} = h^{(1,1)} J.
    """
    eta = J.T @ h + K
    scale = np.eye(len(g)) + np.abs(h) + np.abs(K)
    return {
        "h_symmetric": rel_norm(h - h.T, scale),
        "K_type0220": rel_norm(part11(K, J), scale),
        "KsymJ_vs_h0220": rel_norm(compose_J(sym2(K), J) - part0220(h, J), scale),
        "eta0220_vs_Kskew": rel_norm(part0220(eta, J) - skew2(K), scale),
        "eta11_vs_h11J": rel_norm(part11(eta, J) - compose_J(part11(h, J), J), scale),
    }


def assemble_Q(ct: ClassifiedTensors, spec: FlowSpec, g: np.ndarray,
               J: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The AHCF correction pair (Q1, Q2) from the coefficient vectors."""
    B, E = ct.B, ct.E
    basis1 = [B[0], B[1], B[2], B[4], sym2(B[3]), sym2(B[5]), sym2(B[7]),
              E[0] * g, E[1] * g, E[2] * g, E[3] * g]
    omega = omega_of(g, J)
    basis2 = [compose_J(B[i], J) for i in range(10)] + [E[i] * omega for i in range(4)]
    Q1 = sum(c * M for c, M in zip(spec.q1, basis1, strict=True))
    Q2 = sum(c * M for c, M in zip(spec.q2, basis2, strict=True))
    return np.asarray(Q1, dtype=float), np.asarray(Q2, dtype=float)


def q_conditions(Q1: np.ndarray, Q2: np.ndarray, g: np.ndarray,
                 J: np.ndarray) -> dict:
    """Residuals of the three admissibility conditions on (Q1, Q2)."""
    scale = np.eye(len(g)) + np.abs(Q1) + np.abs(Q2)
    return {
        "Q1_symmetric": rel_norm(Q1 - Q1.T, scale),
        "Q2_type0220": rel_norm(part11(Q2, J), scale),
        "cross": rel_norm(part0220(Q1, J) - compose_J(sym2(Q2), J), scale),
    }


def _check_q(Q1, Q2, g, J, tol):
    report = q_conditions(Q1, Q2, g, J)
    bad = [name for name, r in report.items() if r > tol]
    if bad:
        raise TensorError(
            "inadmissible Q coefficients; failing conditions: " + ", ".join(bad)
        )


# ---------------------------------------------------------------------------
# flow right-hand sides


def rhs_ahcf(pkg: LCPackage, ct: ClassifiedTensors, spec: FlowSpec,
             q_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Almost Hermitian curvature flow: (h, K) at a point."""
    if spec.family != "AHCF":
        raise TensorError("spec.family must be AHCF")
    g, J = pkg.jet.g, pkg.jet.J
    Q1, Q2 = assemble_Q(ct, spec, g, J)
    _check_q(Q1, Q2, g, J, q_tol)
    h = -2.0 * pkg.Ric + Q1
    K = ct.lapJ + ct.scriptN + ct.scriptR + Q2
    if spec.a != 0.0:
        Z = gauge_fields(pkg)["theta_sharp"]
        h = h + spec.a * lie_derivative_g(Z, pkg)
        K = K + spec.a * lie_derivative_J(Z, pkg)
    return h, K


def rhs_scf(pkg: LCPackage, ct: ClassifiedTensors,
            cp: ChernPackage) -> tuple[np.ndarray, np.ndarray, np.ndarray, dict]:
    """Symplectic curvature flow: (eta, h, K) plus consistency residuals."""
    if pkg.jet.setting not in ("almostKahler", "Kahler"):
        raise TensorError("SCF requires an almost Kahler structure")
    g, J = pkg.jet.g, pkg.jet.J
    eta = SCF_ETA_SIGN * cp.P
    K = ct.lapJ + ct.scriptN + ct.scriptR
    # eta^(1,1) = (J^T) h^(1,1) and h^(0,2)+(2,0) = (J^T) K^sym
    h = -J.T @ part11(eta, J) + compose_J(sym2(K), J)
    scale = np.eye(len(g)) + np.abs(eta) + np.abs(pkg.Ric)
    skew_ref = SCF_SKEW_SIGN * (ct.lapJ + ct.scriptN)
    lot = -2.0 * part11(pkg.Ric, J) + SCF_LOT_SIGN * (0.5 * ct.B[0] - ct.B[1])
    residuals = {
        "skew": rel_norm(part0220(eta, J) - skew_ref, scale),
        "h11": rel_norm(part11(h, J) - lot, scale),
    }
    return eta, h, K, residuals


def rhs_hcf(pkg: LCPackage, ct: ClassifiedTensors, cp: ChernPackage,
            spec: FlowSpec, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hermitian curvature flow: (eta, h, K=0); eta must be (1,1)."""
    if spec.family != "HCF":
        raise TensorError("spec.family must be HCF")
    if pkg.jet.setting not in ("Hermitian", "Kahler"):
        raise TensorError("HCF requires a Hermitian structure")
    J = pkg.jet.J
    B = ct.B
    eta = (cp.S
           + spec.a1 * compose_J(B[0], J)
           + spec.a2 * compose_J(B[1], J)
           + spec.a3 * compose_J(part11(B[4], J), J)
           + spec.a4 * compose_J(sym2(B[5]), J))
    res = rel_norm(part0220(eta, J), np.eye(len(J)) + np.abs(eta))
    if res > tol:
        raise TensorError(f"HCF eta fails the (1,1) condition: residual {res:.3e}")
    # K = 0 forces h^(0,2)+(2,0) = 0, so h comes entirely from eta^(1,1)
    h = -J.T @ part11(eta, J)
    return eta, h, np.zeros_like(h)


def flow_rhs(pkg: LCPackage, spec: FlowSpec) -> tuple[np.ndarray, np.ndarray]:
    """Dispatch to the family RHS, returning the deformation pair (h, K)."""
    ct = classified(pkg)
    if spec.family == "AHCF":
        return rhs_ahcf(pkg, ct, spec)
    if spec.family == "SCF":
        cp = chern_connection(pkg, family="almostKahler")
        eta, h, K, _ = rhs_scf(pkg, ct, cp)
        return h, K
    cp = chern_connection(pkg)
    eta, h, K = rhs_hcf(pkg, ct, cp, spec)
    return h, K


# ---------------------------------------------------------------------------
# homogeneous integration

_HOMOGENEOUS = {
    # name -> (base point, coframe, setting); the coframe is the identity at
    # the base point, so frame and coordinate components agree there.
    "flat-torus": (np.zeros(4), None, "Kahler"),
    "kodaira-thurston": (np.zeros(4), _kt_coframe, "almostKahler"),
    "hopf-surface": (np.array([1.0, 0.0, 0.0, 0.0]), _hopf_coframe, "Hermitian"),
}


def _frame_provider(name: str, G: np.ndarray, Jf: np.ndarray) -> StructureProvider:
    base, coframe, setting = _HOMOGENEOUS[name]
    if coframe is None:
        n = len(G)

        def jet_at(x):
            return _invariant_jet(
                x, lambda y: MatrixJet.constant(np.eye(n), n), G, Jf, setting
            )

        return StructureProvider(name, setting, jet_at, {})
    return builtin(name, G=G, Jf=Jf)


def _frame_rhs(name: str, state: FlowState, spec: FlowSpec) -> tuple[np.ndarray, np.ndarray]:
    """(dG/dt, dJf/dt) at the base point, where frame = coordinates."""
    base, _, _ = _HOMOGENEOUS[name]
    pkg = levi_civita(_frame_provider(name, state.G, state.Jf).jet_at(base))
    h, K = flow_rhs(pkg, spec)
    Km = raise_endo(K, pkg.jet.g)
    return h, Km


def monitor_residuals(name: str, state: FlowState, spec: FlowSpec) -> dict:
    """Invariant monitors of a trajectory state."""
    base, _, _ = _HOMOGENEOUS[name]
    G, Jf = state.G, state.Jf
    n = len(G)
    out = {
        "compatibility": float(np.abs(Jf.T @ G @ Jf - G).max()),
        "J_squared": float(np.abs(Jf @ Jf + np.eye(n)).max()),
        "min_eig_G": float(np.linalg.eigvalsh(G).min()),
    }
    pkg = levi_civita(_frame_provider(name, G, Jf).jet_at(base))
    if spec.family == "SCF":
        out["domega"] = domega_norm(pkg)
    if spec.family == "HCF":
        out["nijenhuis"] = nijenhuis_norm(pkg)
    return out


def integrate_homogeneous(name: str, spec: FlowSpec, t_end: float, dt: float,
                          G=None, Jf=None, monitor_tol: float = 1e-4,
                          record_every: int = 1) -> list[dict]:
    """Integrate a flow on a frame-constant built-in with classical RK4.

    Returns a list of trajectory records {t, G, Jf, monitors}.  Raises if G
    loses positive-definiteness (with a singular-time estimate) or a monitor
    residual exceeds ``monitor_tol``.
    """
    if name not in _HOMOGENEOUS:
        raise TensorError(f"{name!r} is not a homogeneous built-in")
    if dt <= 0 or t_end < 0:
        raise TensorError("need dt > 0 and t_end >= 0")
    if G is None or Jf is None:
        jet0 = builtin(name).jet_at(_HOMOGENEOUS[name][0])
        G = jet0.g if G is None else G
        Jf = jet0.J if Jf is None else Jf
    state = FlowState(0.0, np.asarray(G, dtype=float), np.asarray(Jf, dtype=float))

    def rhs(G, Jf):
        return _frame_rhs(name, FlowState(state.t, G, Jf), spec)

    steps = int(round(t_end / dt))
    trajectory = []

    def record():
        mons = monitor_residuals(name, state, spec)
        if mons["min_eig_G"] <= 0.0:
            raise TensorError(
                f"G lost positive-definiteness near t = {state.t:.6g}"
            )
        drift = max(mons["compatibility"], mons["J_squared"],
                    mons.get("domega", 0.0))
        if drift > monitor_tol:
            raise TensorError(
                f"monitor residual {drift:.3e} exceeds {monitor_tol:.1e} "
                f"at t = {state.t:.6g}"
            )
        trajectory.append({
            "t": state.t,
            "G": state.G.copy(),
            "Jf": state.Jf.copy(),
            "monitors": mons,
        })

    record()
    for k in range(steps):
        G0, J0 = state.G, state.Jf
        k1G, k1J = rhs(G0, J0)
        k2G, k2J = rhs(G0 + 0.5 * dt * k1G, J0 + 0.5 * dt * k1J)
        k3G, k3J = rhs(G0 + 0.5 * dt * k2G, J0 + 0.5 * dt * k2J)
        k4G, k4J = rhs(G0 + dt * k3G, J0 + dt * k3J)
        state.G = G0 + (dt / 6.0) * (k1G + 2 * k2G + 2 * k3G + k4G)
        state.Jf = J0 + (dt / 6.0) * (k1J + 2 * k2J + 2 * k3J + k4J)
        state.t = (k + 1) * dt
        if (k + 1) % record_every == 0 or k + 1 == steps:
            record()
    return trajectory


def standard_frame_J(name: str) -> np.ndarray:
    """Default frame J of a homogeneous built-in."""
    base, _, _ = _HOMOGENEOUS[name]
    return builtin(name).jet_at(base).J
