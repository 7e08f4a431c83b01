"""Command-line front end: verification suites, tensor dumps, symbol
certificates, and flow integration with machine-readable reports.

Commands
--------
verify   run the identity suite for a built-in structure at sampled points
tensors  print the tensor inventory at one point
symbol   run symbol certificates over random constrained probes
flow     integrate a flow on a homogeneous built-in and write a trajectory

Exit codes: 0 all checks pass, 1 a check failed, 2 usage/config error.
All floats are serialized with 17 significant digits so reports round-trip
and repeated runs with the same (config, seed) are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .tensors import TensorError, classify_2tensor
from .structures import BUILTIN_NAMES, builtin, sample_points
from .riemann import (
    ak_condition_residuals,
    bianchi_ricci_check,
    dj_identity_residuals,
    domega_norm,
    hermitian_condition_residual,
    levi_civita,
    nijenhuis_norm,
    rho_prime_identity_residual,
)
from .chern import (
    chern_connection,
    chern_form_closedness,
    hermitian_A,
    hermitian_residuals,
    s_type11_residual,
    torsion_type_residual,
)
from .classify import (
    ak_d2j_trace_residual,
    ak_reductions,
    ak_scalar_identity,
    classified,
    dim4_ak_checks,
    hermitian_reductions,
    lapj_n_residuals,
    property_audit,
)
from .symbols import (
    ak_traced_identities,
    ak_constraint_projector,
    ellipticity_certificate,
    hermitian_symbol_certificate,
    random_probe,
)
from .flows import FlowSpec, Q1_BASIS, Q2_BASIS, integrate_homogeneous


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    """Floats to 17-digit form, arrays to nested lists, recursively."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(obj))
    if isinstance(obj, (int, np.integer, bool, str)) or obj is None:
        return obj
    return str(obj)


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# verify


def _flatten(prefix: str, residuals) -> list[tuple[str, float]]:
    if isinstance(residuals, dict):
        out = []
        for k, v in residuals.items():
            out.extend(_flatten(f"{prefix}.{k}", v))
        return out
    return [(prefix, float(residuals))]


def _point_checks(pkg, tol: float) -> list[tuple[str, float]]:
    setting = pkg.jet.setting
    checks = []
    checks += _flatten("dj", dj_identity_residuals(pkg))
    checks += _flatten("bianchi", bianchi_ricci_check(pkg))
    checks += _flatten("rho_prime_trace", rho_prime_identity_residual(pkg))
    ct = classified(pkg)
    checks += _flatten("lapJ_N", lapj_n_residuals(ct, pkg.jet.g, pkg.jet.J))
    audit = property_audit(ct, pkg.jet.g, pkg.jet.J, setting, tol=tol)
    audit.pop("ok")
    checks += _flatten("properties", audit)
    if setting in ("Hermitian", "Kahler"):
        checks += _flatten("hermitian_dj", hermitian_condition_residual(pkg))
        checks += _flatten("hermitian_reductions", hermitian_reductions(ct, setting))
        checks += _flatten("nijenhuis", nijenhuis_norm(pkg))
    if setting in ("almostKahler", "Kahler"):
        checks += _flatten("ak_dj", ak_condition_residuals(pkg))
        checks += _flatten("ak_reductions", ak_reductions(ct, setting))
        checks += _flatten("ak_scalar", ak_scalar_identity(pkg, ct, setting))
        checks += _flatten("ak_lapJ_trace", ak_d2j_trace_residual(pkg))
        checks += _flatten("domega", domega_norm(pkg))
        if pkg.jet.g.shape[0] == 4:
            checks += _flatten("dim4", dim4_ak_checks(ct, pkg.jet.g, setting))
    # Chern connection family checks at t in {-1, 0, 1}
    for t in (-1.0, 0.0, 1.0):
        A, dA = hermitian_A(pkg, t, setting)
        checks += _flatten(f"chern_t{t:+.0f}", hermitian_residuals(A, pkg))
    cp = chern_connection(pkg)
    checks += _flatten("chern_torsion_type", torsion_type_residual(cp, pkg.jet.J))
    checks += _flatten("chern_S_type", s_type11_residual(cp, pkg.jet.J))
    return checks


def cmd_verify(cfg: dict) -> tuple[dict, int]:
    prov = builtin(cfg["structure"], **cfg["params"])
    pts = sample_points(cfg["structure"], cfg["points"], cfg["seed"])
    tol = cfg["tol_analytic"]
    records, failures = [], 0
    for x in pts:
        pkg = levi_civita(prov.jet_at(x))
        for name, residual in _point_checks(pkg, tol):
            ok = residual <= tol
            failures += 0 if ok else 1
            records.append({
                "check": name,
                "point": list(x),
                "residual": residual,
                "tolerance": tol,
                "pass": ok,
            })
    report = {
        "suite": f"verify:{cfg['structure']}",
        "version": __version__,
        "config": cfg,
        "records": records,
        "summary": {
            "total": len(records),
            "passed": len(records) - failures,
            "failed": failures,
        },
    }
    return report, (0 if failures == 0 else 1)


# ---------------------------------------------------------------------------
# tensors


def cmd_tensors(cfg: dict) -> tuple[dict, int]:
    prov = builtin(cfg["structure"], **cfg["params"])
    x = np.asarray(cfg["point"] if cfg.get("point") is not None
                   else sample_points(cfg["structure"], 1, cfg["seed"])[0])
    pkg = levi_civita(prov.jet_at(x))
    ct = classified(pkg)
    cp = chern_connection(pkg)
    g, J = pkg.jet.g, pkg.jet.J

    def flags(T):
        f = classify_2tensor(T, g, J)
        return {"symmetric": f.symmetric, "skew": f.skew,
                "type11": f.type11, "type0220": f.type0220}

    entry = lambda T: {"value": T, "flags": flags(np.asarray(T))}
    report = {
        "suite": f"tensors:{cfg['structure']}",
        "version": __version__,
        "config": cfg,
        "point": list(x),
        "g": g, "J": J, "DJ": pkg.DJ, "Rm": pkg.Rm,
        "Ric": entry(pkg.Ric), "theta": pkg.theta,
        "scalar": {"R": pkg.R, "sPrime": pkg.sPrime,
                   "E1": ct.E[0], "E2": ct.E[1], "E3": ct.E[2], "E4": ct.E[3]},
        "B": {f"B{i + 1}": entry(ct.B[i]) for i in range(10)},
        "P": entry(cp.P), "S": entry(cp.S),
    }
    return report, 0


# ---------------------------------------------------------------------------
# symbol


def cmd_symbol(cfg: dict) -> tuple[dict, int]:
    seed, trials = cfg["seed"], cfg["points"]
    worst = {}
    for dim in (4, 6):
        cert = ellipticity_certificate(seed, trials, dim)
        worst[f"metric_dim{dim}"] = cert["metric"]
        worst[f"j_dim{dim}"] = cert["J"]
        worst[f"hermitian_dim{dim}"] = hermitian_symbol_certificate(
            seed, trials, dim)["residual"]
        rng = np.random.default_rng(seed + dim)
        tmax = 0.0
        for _ in range(trials):
            q = ak_constraint_projector(random_probe(dim, rng, constrained=False))
            tmax = max(tmax, max(ak_traced_identities(q).values()))
        worst[f"traced_dim{dim}"] = tmax
    residual = max(worst.values())
    ok = residual < 1e-10
    report = {
        "suite": "symbol",
        "version": __version__,
        "config": cfg,
        "residuals": worst,
        "max_residual": residual,
        "pass": ok,
    }
    return report, (0 if ok else 1)


# ---------------------------------------------------------------------------
# flow


def cmd_flow(cfg: dict, out_stream) -> tuple[dict, int]:
    spec = FlowSpec(family=cfg["flow"], a=cfg["a"],
                    q1=tuple(cfg["q1"]), q2=tuple(cfg["q2"]),
                    a1=cfg["a1"], a2=cfg["a2"], a3=cfg["a3"], a4=cfg["a4"])
    code = 0
    trajectory = []
    error = None
    try:
        trajectory = integrate_homogeneous(
            cfg["structure"], spec, cfg["t_end"], cfg["dt"],
            monitor_tol=cfg["tol_fd"],
        )
    except TensorError as exc:
        error = str(exc)
        code = 1
    for rec in trajectory:
        out_stream.write(_dumps({
            "t": rec["t"],
            "G": rec["G"],
            "Jf": rec["Jf"],
            "monitors": rec["monitors"],
        }) + "\n")
    report = {
        "suite": f"flow:{cfg['flow']}:{cfg['structure']}",
        "version": __version__,
        "config": cfg,
        "steps_recorded": len(trajectory),
        "final_t": trajectory[-1]["t"] if trajectory else None,
        "error": error,
    }
    return report, code


# ---------------------------------------------------------------------------
# argument handling


def _parse_params(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise TensorError(f"malformed --params entry {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            out[k.strip()] = v.strip()
    return out


def _parse_vector(text: str, n: int, flag: str) -> list[float]:
    vals = [float(v) for v in text.split(",")] if text else []
    if not vals:
        return [0.0] * n
    if len(vals) != n:
        raise TensorError(f"{flag} needs {n} comma-separated coefficients")
    return vals


def build_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)

    def pick(name, default):
        cli = getattr(args, name.replace("-", "_"), None)
        if cli is not None:
            return cli
        return cfg.get(name, default)

    out = {
        "command": args.command,
        "structure": pick("structure", "flat-torus"),
        "params": _parse_params(pick("params", "")) if isinstance(
            pick("params", ""), str) else pick("params", {}),
        "points": int(pick("points", 20)),
        "seed": int(pick("seed", 0)),
        "tol_analytic": float(pick("tol_analytic", 1e-9)),
        "tol_fd": float(pick("tol_fd", 1e-5)),
        "point": pick("point", None),
        "flow": pick("flow", "SCF"),
        "a": float(pick("a", 0.0)),
        "q1": _parse_vector(str(pick("q1", "") or ""), len(Q1_BASIS), "--q1"),
        "q2": _parse_vector(str(pick("q2", "") or ""), len(Q2_BASIS), "--q2"),
        "a1": float(pick("a1", 0.0)),
        "a2": float(pick("a2", 0.0)),
        "a3": float(pick("a3", 0.0)),
        "a4": float(pick("a4", 0.0)),
        "t_end": float(pick("t_end", 0.1)),
        "dt": float(pick("dt", 1e-3)),
        "out": pick("out", None),
        "format": pick("format", "json"),
    }
    if out["points"] < 1:
        raise TensorError("--points must be >= 1")
    if out["tol_analytic"] <= 0 or out["tol_fd"] <= 0:
        raise TensorError("tolerances must be positive")
    if out["structure"] not in BUILTIN_NAMES:
        raise TensorError(f"unknown structure {out['structure']!r}")
    if out["format"] not in ("json", "text"):
        raise TensorError("--format must be json or text")
    return out


def _emit(report: dict, cfg: dict, stream) -> None:
    if cfg["format"] == "json":
        stream.write(_dumps(report) + "\n")
        return
    def walk(obj, indent=0):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (dict, list)):
                    stream.write(f"{pad}{k}:\n")
                    walk(v, indent + 1)
                else:
                    v = _fmt(v) if isinstance(v, float) else v
                    stream.write(f"{pad}{k}: {v}\n")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)):
                    walk(v, indent + 1)
                else:
                    stream.write(f"{pad}- {v}\n")
    walk(_jsonable(report))


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ahlab",
        description="numerical laboratory for almost Hermitian geometry",
    )
    ap.add_argument("command", choices=("verify", "tensors", "symbol", "flow"))
    ap.add_argument("--config", help="JSON config file; flags override it")
    ap.add_argument("--structure", choices=BUILTIN_NAMES)
    ap.add_argument("--params", help="comma-separated k=v structure parameters")
    ap.add_argument("--points", type=int, help="sample-point / trial count")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol-analytic", type=float, dest="tol_analytic")
    ap.add_argument("--tol-fd", type=float, dest="tol_fd")
    ap.add_argument("--point", type=float, nargs="+", help="chart point for tensors")
    ap.add_argument("--flow", choices=("AHCF", "SCF", "HCF"))
    ap.add_argument("--a", type=float, help="AHCF gauge coefficient")
    ap.add_argument("--q1", help=f"{len(Q1_BASIS)} comma-separated AHCF Q1 coefficients")
    ap.add_argument("--q2", help=f"{len(Q2_BASIS)} comma-separated AHCF Q2 coefficients")
    for i in (1, 2, 3, 4):
        ap.add_argument(f"--a{i}", type=float, help=f"HCF coefficient a{i}")
    ap.add_argument("--t-end", type=float, dest="t_end")
    ap.add_argument("--dt", type=float)
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", choices=("json", "text"))
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
        cfg = build_config(args)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    except (TensorError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    stream = open(cfg["out"], "w", encoding="utf-8") if cfg["out"] else sys.stdout
    try:
        if cfg["command"] == "verify":
            report, code = cmd_verify(cfg)
        elif cfg["command"] == "tensors":
            report, code = cmd_tensors(cfg)
        elif cfg["command"] == "symbol":
            report, code = cmd_symbol(cfg)
        else:
            report, code = cmd_flow(cfg, stream)
        _emit(report, cfg, stream)
        return code
    except BrokenPipeError:
        return 0
    except TensorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if cfg["out"]:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
