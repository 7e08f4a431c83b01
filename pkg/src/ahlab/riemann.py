"""Levi-Civita calculus from 2-jets of (g, J).

Sign conventions follow Rm(X,Y,Z,W) = g(D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z, W)
and Ric(X,Y) = Rm(e_i, X, Y, e_i).  All rank >= 2 outputs are fully covariant;
derivative slots come first, e.g. DJ[a, b, c] = g((D_a J) e_b, e_c).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .structures import StructureJet


@dataclass(frozen=True)
class LCPackage:
    """Levi-Civita connection data and curvature at a point."""

    jet: StructureJet
    gi: np.ndarray          # inverse metric
    dgi: np.ndarray         # d_c (g^-1)
    Gam: np.ndarray         # Gam[k, i, j] = Gamma^k_ij
    dGam: np.ndarray        # dGam[c, k, i, j] = d_c Gamma^k_ij
    DJm: np.ndarray         # DJm[a, l, b] = ((D_a J) e_b)^l
    dDJm: np.ndarray        # d_c DJm
    DJ: np.ndarray          # DJ[a, b, c] covariant
    dDJ: np.ndarray         # d_c DJ[a, b, c]
    D2J: np.ndarray         # D2J[a, b, c, d] covariant
    Rm: np.ndarray          # Rm[i, j, k, l] covariant
    Ric: np.ndarray
    R: float
    rhoPrime: np.ndarray    # rho'(X, Y) = Rm(JX, Y, i, Ji)
    sPrime: float           # s' = Rm(i, Ji, j, Jj)
    theta: np.ndarray       # Lee form, covariant
    thetaSharp: np.ndarray  # raised Lee form
    Nij: np.ndarray         # Nijenhuis tensor, covariant [x, y, z]
    omega: np.ndarray
    domega: np.ndarray      # exterior derivative of omega, [a, b, c]


def levi_civita(jet: StructureJet) -> LCPackage:
    """Assemble Christoffel symbols, curvature and the derived aH tensors."""
    g, dg, ddg = jet.g, jet.dg, jet.ddg
    J, dJ, ddJ = jet.J, jet.dJ, jet.ddJ
    gi = np.linalg.inv(g)
    dgi = -np.einsum("ij,cjk,kl->cil", gi, dg, gi)

    # Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    half_br = 0.5 * (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - np.einsum("lij->lij", dg)
    )
    Gam = np.einsum("kl,lij->kij", gi, half_br)
    dhalf = 0.5 * (
        np.einsum("cijl->clij", ddg) + np.einsum("cjil->clij", ddg) - np.einsum("clij->clij", ddg)
    )
    dGam = np.einsum("ckl,lij->ckij", dgi, half_br) + np.einsum("kl,clij->ckij", gi, dhalf)

    # DJ as endomorphism-valued 1-form and its coordinate derivative
    DJm = (
        np.einsum("alk->alk", dJ)
        + np.einsum("lap,pk->alk", Gam, J)
        - np.einsum("pak,lp->alk", Gam, J)
    )
    dDJm = (
        np.einsum("calk->calk", ddJ)
        + np.einsum("clap,pk->calk", dGam, J)
        + np.einsum("lap,cpk->calk", Gam, dJ)
        - np.einsum("cpak,lp->calk", dGam, J)
        - np.einsum("pak,clp->calk", Gam, dJ)
    )
    DJ = np.einsum("alb,lc->abc", DJm, g)
    dDJ = np.einsum("calb,lz->cabz", dDJm, g) + np.einsum("alb,clz->cabz", DJm, dg)

    # second covariant derivative of J
    D2Jm = (
        dDJm
        + np.einsum("lap,bpk->ablk", Gam, DJm)
        - np.einsum("pab,plk->ablk", Gam, DJm)
        - np.einsum("pak,blp->ablk", Gam, DJm)
    )
    D2J = np.einsum("ablk,lc->abkc", D2Jm, g)

    # curvature
    Rmix = (
        np.einsum("imjk->mkij", dGam)
        - np.einsum("jmik->mkij", dGam)
        + np.einsum("mip,pjk->mkij", Gam, Gam)
        - np.einsum("mjp,pik->mkij", Gam, Gam)
    )
    Rm = np.einsum("mkij,lm->ijkl", Rmix, g)
    Ric = np.einsum("ab,axyb->xy", gi, Rm)
    R = float(np.einsum("xy,xy->", gi, Ric))
    rhoPrime = np.einsum("cx,de,fe,cydf->xy", J, gi, J, Rm)
    sPrime = float(np.einsum("ab,cb,de,fe,acdf->", gi, J, gi, J, Rm))

    theta = np.einsum("ab,mb,amc->c", gi, J, DJ)
    thetaSharp = gi @ theta

    # N_J(X,Y,Z) = DJ(JX,Y,Z) - DJ(JY,X,Z) + DJ(X,Y,JZ) - DJ(Y,X,JZ)
    Nij = (
        np.einsum("cx,cyz->xyz", J, DJ)
        - np.einsum("cy,cxz->xyz", J, DJ)
        + np.einsum("cz,xyc->xyz", J, DJ)
        - np.einsum("cz,yxc->xyz", J, DJ)
    )

    omega = J.T @ g
    # d_c omega_{ab}, then the alternating sum d_a w_bc + d_b w_ca + d_c w_ab
    dom = np.einsum("cla,lb->cab", dJ, g) + np.einsum("la,clb->cab", J, dg)
    domega = dom + np.einsum("bca->abc", dom) + np.einsum("cab->abc", dom)

    return LCPackage(
        jet=jet, gi=gi, dgi=dgi, Gam=Gam, dGam=dGam,
        DJm=DJm, dDJm=dDJm, DJ=DJ, dDJ=dDJ, D2J=D2J,
        Rm=Rm, Ric=Ric, R=R, rhoPrime=rhoPrime, sPrime=sPrime,
        theta=theta, thetaSharp=thetaSharp, Nij=Nij,
        omega=omega, domega=domega,
    )


def bianchi_ricci_check(pkg: LCPackage) -> dict:
    """Residuals of the first Bianchi identity and the Ricci identity on omega."""
    Rm = pkg.Rm
    first = Rm + np.einsum("ijkl->jkil", Rm) + np.einsum("ijkl->kijl", Rm)
    g = pkg.jet.g
    # Ricci identity for the 2-tensor omega = J lowered:
    # D^2 w(X,Y,Z,W) - D^2 w(Y,X,Z,W) + w(Rm(X,Y)Z, W) + w(Z, Rm(X,Y)W) = 0
    Rmix = np.einsum("ijkl,lm->mkij", Rm, pkg.gi)
    omega = pkg.omega
    ricci = (
        pkg.D2J
        - np.einsum("abzw->bazw", pkg.D2J)
        + np.einsum("mzab,mw->abzw", Rmix, omega)
        + np.einsum("mwab,zm->abzw", Rmix, omega)
    )
    scale = max(np.linalg.norm(Rm), 1.0)
    return {
        "first_bianchi": float(np.linalg.norm(first) / scale),
        "ricci_identity": float(np.linalg.norm(ricci) / scale),
    }


def _guarded(residual: np.ndarray, reference: np.ndarray) -> float:
    denom = np.linalg.norm(reference)
    return float(np.linalg.norm(residual) / (denom if denom > 1e-12 else 1.0))


def dj_identity_residuals(pkg: LCPackage) -> dict:
    """DJ skewness and (0,2)+(2,0) type in the last two slots."""
    DJ, J = pkg.DJ, pkg.jet.J
    skew = DJ + np.einsum("abc->acb", DJ)
    type02 = np.einsum("pb,qc,apq->abc", J, J, DJ) + DJ
    return {
        "skew_last_two": _guarded(skew, DJ),
        "type_last_two": _guarded(type02, DJ),
    }


def hermitian_condition_residual(pkg: LCPackage) -> float:
    """|DJ(JX,JY,Z) - DJ(X,Y,Z)| (vanishes iff N_J = 0)."""
    DJ, J = pkg.DJ, pkg.jet.J
    return _guarded(np.einsum("pa,qb,pqc->abc", J, J, DJ) - DJ, DJ)


def ak_condition_residuals(pkg: LCPackage) -> dict:
    """Cyclic identity and DJ(JX,JY,Z) = -DJ(X,Y,Z) (hold iff d omega = 0)."""
    DJ, J = pkg.DJ, pkg.jet.J
    cyc = DJ + np.einsum("abc->bca", DJ) + np.einsum("abc->cab", DJ)
    anti = np.einsum("pa,qb,pqc->abc", J, J, DJ) + DJ
    return {"cyclic": _guarded(cyc, DJ), "anti_invariance": _guarded(anti, DJ)}


def rho_prime_identity_residual(pkg: LCPackage) -> float:
    """|Rm(JX,i,Ji,Y) + (1/2) rho'(X,Y)| (first-Bianchi consequence)."""
    J, gi, Rm = pkg.jet.J, pkg.gi, pkg.Rm
    T = np.einsum("px,ab,qb,paqy->xy", J, gi, J, Rm)
    return _guarded(T + 0.5 * pkg.rhoPrime, pkg.rhoPrime)


def nijenhuis_norm(pkg: LCPackage) -> float:
    return float(np.linalg.norm(pkg.Nij))


def domega_norm(pkg: LCPackage) -> float:
    return float(np.linalg.norm(pkg.domega))


# ---------------------------------------------------------------------------
# vector fields with 1-jets, Lie derivatives, gauge fields


@dataclass(frozen=True)
class VectorJet:
    """A vector field value and its coordinate derivative at a point."""

    v: np.ndarray   # Z^k
    d: np.ndarray   # d[c, k] = d_c Z^k


def covariant_DZ(Z: VectorJet, pkg: LCPackage) -> np.ndarray:
    """Lowered covariant derivative DZ[a, b] = g(D_a Z, e_b)."""
    DZm = Z.d + np.einsum("kap,p->ak", pkg.Gam, Z.v)
    return np.einsum("ak,kb->ab", DZm, pkg.jet.g)


def lie_derivative_g(Z: VectorJet, pkg: LCPackage) -> np.ndarray:
    """(L_Z g)(X, Y) = g(D_X Z, Y) + g(X, D_Y Z)."""
    DZ = covariant_DZ(Z, pkg)
    return DZ + DZ.T


def lie_derivative_J(Z: VectorJet, pkg: LCPackage) -> np.ndarray:
    """(L_Z J)(X, Y) = DJ(Z, X, Y) - DZ(JX, Y) - DZ(X, JY)."""
    DZ = covariant_DZ(Z, pkg)
    J = pkg.jet.J
    return (
        np.einsum("c,cxy->xy", Z.v, pkg.DJ)
        - np.einsum("ax,ay->xy", J, DZ)
        - np.einsum("by,xb->xy", J, DZ)
    )


def gauge_fields(pkg: LCPackage) -> dict[str, VectorJet]:
    """The five gauge vector fields with 1-jets.

    The background connection is the flat coordinate connection of the chart,
    so Dbar g = dg.  theta_sharp = DJ(i, Ji) raised; the Xbar fields are the
    traces of Dbar g.
    """
    jet = pkg.jet
    g, dg, ddg, J, dJ = jet.g, jet.dg, jet.ddg, jet.J, jet.dJ
    gi, dgi = pkg.gi, pkg.dgi

    theta_v = np.einsum("kz,ab,mb,amz->k", gi, gi, J, pkg.DJ)
    theta_d = (
        np.einsum("ckz,ab,mb,amz->ck", dgi, gi, J, pkg.DJ)
        + np.einsum("kz,cab,mb,amz->ck", gi, dgi, J, pkg.DJ)
        + np.einsum("kz,ab,cmb,amz->ck", gi, gi, dJ, pkg.DJ)
        + np.einsum("kz,ab,mb,camz->ck", gi, gi, J, pkg.dDJ)
    )
    theta_sharp = VectorJet(theta_v, theta_d)

    Jts_v = J @ theta_v
    Jts_d = np.einsum("clk,k->cl", dJ, theta_v) + np.einsum("lk,ck->cl", J, theta_d)
    j_theta_sharp = VectorJet(Jts_v, Jts_d)

    # Xbar1^k = g^{kl} g^{ij} d_i g_{jl}
    x1_v = np.einsum("kl,ij,ijl->k", gi, gi, dg)
    x1_d = (
        np.einsum("ckl,ij,ijl->ck", dgi, gi, dg)
        + np.einsum("kl,cij,ijl->ck", gi, dgi, dg)
        + np.einsum("kl,ij,cijl->ck", gi, gi, ddg)
    )
    # Xbar2^k = g^{kl} g^{ij} d_l g_{ij}
    x2_v = np.einsum("kl,ij,lij->k", gi, gi, dg)
    x2_d = (
        np.einsum("ckl,ij,lij->ck", dgi, gi, dg)
        + np.einsum("kl,cij,lij->ck", gi, dgi, dg)
        + np.einsum("kl,ij,clij->ck", gi, gi, ddg)
    )
    # Xbar0^k = g^{jk} J^l_j g^{ab} J^i_b d_a g_{il}
    x0_v = np.einsum("jk,lj,ab,ib,ail->k", gi, J, gi, J, dg)
    x0_d = (
        np.einsum("cjk,lj,ab,ib,ail->ck", dgi, J, gi, J, dg)
        + np.einsum("jk,clj,ab,ib,ail->ck", gi, dJ, gi, J, dg)
        + np.einsum("jk,lj,cab,ib,ail->ck", gi, J, dgi, J, dg)
        + np.einsum("jk,lj,ab,cib,ail->ck", gi, J, gi, dJ, dg)
        + np.einsum("jk,lj,ab,ib,cail->ck", gi, J, gi, J, ddg)
    )
    return {
        "theta_sharp": theta_sharp,
        "J_theta_sharp": j_theta_sharp,
        "Xbar0": VectorJet(x0_v, x0_d),
        "Xbar1": VectorJet(x1_v, x1_d),
        "Xbar2": VectorJet(x2_v, x2_d),
    }


def lie_theta_via_d2j(pkg: LCPackage) -> np.ndarray:
    """L_{theta#} J expanded into D2J and DJ*DJ terms."""
    J, gi = pkg.jet.J, pkg.gi
    DJ, D2J = pkg.DJ, pkg.D2J
    # -D2J(JX,i,Ji,Y) - D2J(X,i,Ji,JY)
    t1 = -np.einsum("cx,ab,mb,camy->xy", J, gi, J, D2J)
    t2 = -np.einsum("ab,mb,qy,xamq->xy", gi, J, J, D2J)
    # -DJ(JX,i,j)DJ(i,j,Y) - DJ(X,i,j)DJ(i,j,JY)
    t3 = -np.einsum("cx,aA,bB,cab,ABy->xy", J, gi, gi, DJ, DJ)
    t4 = -np.einsum("aA,bB,xab,qy,ABq->xy", gi, gi, DJ, J, DJ)
    # + DJ(j,X,Y) DJ(i,Ji,j)
    t5 = np.einsum("jp,jxy,ab,mb,amp->xy", gi, DJ, gi, J, DJ)
    return t1 + t2 + t3 + t4 + t5
