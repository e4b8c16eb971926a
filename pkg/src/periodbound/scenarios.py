"""Scenario execution behind the command-line interface.

Every scenario expands into a list of independent cases. A case maps an
``inputs`` dict to ``outputs`` and a ``pass`` flag; an exception inside a case
is recorded in that case and does not abort the rest.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from periodbound import __version__
from periodbound.applications import (
    LotkaVolterraParams,
    ReactionDiffusionGrowth,
    lv_period_bound,
    nse_lipschitz_ratio,
    nse_period_bound,
    rd_alpha,
)
from periodbound.applications.navier_stokes import sample_pairs
from periodbound.bounds import BoundParams, bracket_family, k_alpha, optimize_bracket
from periodbound.config import ScenarioConfig
from periodbound.errors import ParameterError
from periodbound.evolution import IntegratorConfig, integrate
from periodbound.io import rows_to_csv
from periodbound.orbits import (
    PeriodicOrbitCertificate,
    RotationOrbitSpec,
    detect_period,
    make_rotation_system,
    measure_period,
    refine_orbit,
    verify_bound,
    verify_proof_chain,
)

Case = dict[str, Any]


def _bound_case(inputs: Mapping[str, Any]) -> Case:
    alpha = inputs["alpha"]
    res = k_alpha(alpha)
    out: dict[str, Any] = {"k_value": res.k_value, "bracket": res.bracket}
    ok = res.k_value > 0
    if inputs.get("optimize"):
        opt = optimize_bracket(alpha)
        out["optimized"] = opt.to_dict()
        ok = ok and abs(opt.k_value - res.k_value) <= 1e-6
    if inputs.get("delta") is not None:
        bp = BoundParams(alpha, inputs["delta"], inputs["p"])
        fam = bracket_family(bp)
        out["family_bracket"] = fam
        out["family_k_value"] = fam ** (-1.0 / (1.0 - alpha))
        ok = ok and fam >= res.bracket * (1.0 - 1e-12)
    if inputs.get("lipschitz") is not None:
        out["period_bound"] = res.k_value * inputs["lipschitz"] ** (-1.0 / (1.0 - alpha))
    return {"outputs": out, "pass": bool(ok)}


def _sweep_case(inputs: Mapping[str, Any]) -> Case:
    spec = RotationOrbitSpec(inputs["lam"], inputs["omega"], inputs["radius"], inputs["alpha"])
    rot = make_rotation_system(spec)
    check = verify_bound(rot.certificate)
    out: dict[str, Any] = {"certificate": rot.certificate.to_dict(), "verified": check.passed}
    ok = check.passed
    if inputs.get("remeasure"):
        T = measure_period(rot.system, rot.initial_state, spec.period,
                           samples_per_period=inputs["samples_per_period"])
        rel = abs(T - spec.period) / spec.period
        detected = PeriodicOrbitCertificate.from_data(T, spec.alpha, spec.lipschitz, "detected")
        out["measured_period"] = T
        out["measured_rel_error"] = rel
        out["measured_verified"] = verify_bound(detected).passed
        ok = ok and rel <= 1e-4 and out["measured_verified"]
    return {"outputs": out, "pass": bool(ok)}


def _orbit_case(inputs: Mapping[str, Any]) -> Case:
    spec = RotationOrbitSpec(inputs["lam"], inputs["omega"], inputs["radius"], inputs["alpha"],
                             tuple(inputs["inert"]))
    rot = make_rotation_system(spec)
    rng = np.random.default_rng(inputs["seed"])
    u0 = rot.initial_state.copy()
    a, b = rot.active
    inert = [k for k in range(u0.size) if k not in (a, b)]
    u0[inert] = rng.uniform(-0.5, 0.5, len(inert))
    T = spec.period
    dt = T / inputs["samples_per_period"]
    traj = integrate(rot.system, u0, IntegratorConfig(dt, inputs["transient"] + 2.5 * T, inputs["scheme"]))
    tail = traj.after(inputs["transient"])
    T_det = detect_period(tail, tail.states[0])
    out: dict[str, Any] = {
        "analytic": rot.certificate.to_dict(),
        "detected": PeriodicOrbitCertificate.from_data(T_det, spec.alpha, spec.lipschitz, "detected").to_dict(),
        "detected_rel_error": abs(T_det - T) / T,
    }
    ok = verify_bound(rot.certificate).passed and out["detected_rel_error"] <= 1e-4
    if inputs["refine"]:
        guess = tail.states[0] + inputs["perturb"] * rng.standard_normal(u0.size) * spec.radius
        u_ref, T_ref = refine_orbit(rot.system, guess, T_det)
        cert = PeriodicOrbitCertificate.from_data(T_ref, spec.alpha, spec.lipschitz, "refined")
        out["refined"] = cert.to_dict()
        out["refined_state"] = u_ref
        out["refined_rel_error"] = abs(T_ref - T) / T
        ok = ok and verify_bound(cert).passed and out["refined_rel_error"] <= 1e-9
    if inputs.get("trajectory"):
        out["_trajectory"] = (traj.times, traj.states)
    return {"outputs": out, "pass": bool(ok)}


def _proof_chain_case(inputs: Mapping[str, Any]) -> Case:
    spec = RotationOrbitSpec(inputs["lam"], inputs["omega"], inputs["radius"], inputs["alpha"])
    rot = make_rotation_system(spec)
    T = spec.period
    M = inputs["samples_per_period"]
    traj = integrate(rot.system, rot.initial_state, IntegratorConfig(T / M, 2.0 * T, inputs["scheme"]))
    params = BoundParams(spec.alpha, inputs["delta"], inputs["p"])
    report = verify_proof_chain(rot.system, traj, T, inputs["tau"] * T, params)
    return {"outputs": report.to_dict(), "pass": report.passed}


def _lv_case(inputs: Mapping[str, Any]) -> Case:
    keys = ("lam", "mu", "a", "b", "c", "d", "C_alpha", "R", "N", "M")
    params = LotkaVolterraParams(**{k: inputs[k] for k in keys})
    res = lv_period_bound(params, c=inputs["constant"])
    ok = res.lipschitz >= 0 and (res.theorem_form is None or res.theorem_form > 0)
    return {"outputs": res.to_dict(), "pass": bool(ok)}


def _rd_case(inputs: Mapping[str, Any]) -> Case:
    res = rd_alpha(ReactionDiffusionGrowth(inputs["n"], inputs["p"], inputs["q"]))
    return {"outputs": res.to_dict(), "pass": True}


def _nse_case(inputs: Mapping[str, Any]) -> Case:
    G = inputs["G"]
    rng = np.random.default_rng([inputs["seed"], int(round(G * 1000))])
    c = nse_lipschitz_ratio(sample_pairs(inputs["N"], G, inputs["pairs"], rng), G)
    constant = inputs["constant"] if inputs.get("constant") is not None else c
    out = {
        "measured_c": c,
        "period_bound": nse_period_bound(G, constant),
        "constant_source": "configured" if inputs.get("constant") is not None else "measured",
    }
    return {"outputs": out, "pass": bool(np.isfinite(c) and c > 0)}


RUNNERS: dict[str, Callable[[Mapping[str, Any]], Case]] = {
    "bound": _bound_case,
    "sweep": _sweep_case,
    "orbit": _orbit_case,
    "proof-chain": _proof_chain_case,
    "lv": _lv_case,
    "rd": _rd_case,
    "nse-estimate": _nse_case,
}


def expand_cases(cfg: ScenarioConfig) -> list[dict[str, Any]]:
    p = dict(cfg.params)
    kind = cfg.kind
    if kind == "bound":
        return [{**p, "alpha": a} for a in p["alpha"]]
    if kind == "sweep":
        grid = list(itertools.product(p["lams"], p["omegas"], p["alphas"]))
        n_re = min(p["remeasure"], len(grid))
        # spread re-measured cases evenly over the grid
        chosen = set(np.linspace(0, len(grid) - 1, n_re).round().astype(int).tolist()) if n_re else set()
        return [
            {"lam": l, "omega": w, "alpha": a, "radius": p["radius"], "remeasure": i in chosen,
             "samples_per_period": p["samples_per_period"]}
            for i, (l, w, a) in enumerate(grid)
        ]
    if kind == "orbit":
        return [{**p, "seed": cfg.seed}]
    if kind == "proof-chain":
        base = {k: p[k] for k in ("lam", "omega", "alpha", "radius", "samples_per_period", "scheme")}
        return [{**base, "tau": t, "delta": d, "p": pp}
                for t, d, pp in itertools.product(p["taus"], p["deltas"], p["ps"])]
    if kind == "lv":
        return [{**p, "R": r} for r in p["R"]]
    if kind == "rd":
        return [{"n": p["n"], "p": a, "q": b} for a, b in itertools.product(p["p"], p["q"])]
    if kind == "nse-estimate":
        return [{"N": p["N"], "G": g, "pairs": p["pairs"], "constant": p["constant"], "seed": cfg.seed}
                for g in p["G"]]
    raise ParameterError(f"unknown scenario kind {kind!r}")


def _safe_case(kind: str, inputs: Mapping[str, Any]) -> Case:
    try:
        result = RUNNERS[kind](inputs)
        return {"inputs": dict(inputs), "outputs": result["outputs"], "pass": result["pass"]}
    except Exception as exc:  # recorded per case; the sweep continues
        return {"inputs": dict(inputs), "outputs": None, "pass": False,
                "error": f"{type(exc).__name__}: {exc}"}


def _suite_checks(cfg: ScenarioConfig, cases: list[Case]) -> list[Case]:
    """Scenario-level properties that span several cases."""
    if cfg.kind == "nse-estimate" and len(cases) > 1:
        cs = [c["outputs"]["measured_c"] for c in cases if c["outputs"]]
        ratio = max(cs) / min(cs) if cs and min(cs) > 0 else math.inf
        factor = cfg.params["stability_factor"]
        return [{"inputs": {"check": "stability", "factor": factor},
                 "outputs": {"max_over_min": ratio}, "pass": bool(ratio <= factor)}]
    return []


def run(cfg: ScenarioConfig, jobs: int = 1) -> dict[str, Any]:
    """Execute *cfg* and return the report dictionary."""
    start = time.perf_counter()
    inputs = expand_cases(cfg)
    if jobs > 1 and len(inputs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(_safe_case, itertools.repeat(cfg.kind), inputs))
    else:
        cases = [_safe_case(cfg.kind, x) for x in inputs]
    cases.extend(_suite_checks(cfg, cases))
    passed = sum(1 for c in cases if c["pass"])
    failed = len(cases) - passed
    return {
        "scenario": cfg.to_dict(),
        "cases": cases,
        "verdict": {"status": "pass" if failed == 0 else "fail", "passed": passed, "failed": failed},
        "version": __version__,
        "duration_s": time.perf_counter() - start,
    }


def _lookup(record: Mapping[str, Any], name: str) -> Any:
    """Resolve ``a.b`` against a case's outputs, then its inputs."""
    for root in (record.get("outputs") or {}, record.get("inputs") or {}):
        node: Any = root
        for part in name.split("."):
            if isinstance(node, Mapping) and part in node:
                node = node[part]
            else:
                node = _MISSING
                break
        if node is not _MISSING:
            return node
    raise ParameterError(f"unknown field {name!r}")


_MISSING = object()


def emit_plotdata(report: Mapping[str, Any], axes: Sequence[str]) -> str:
    """CSV with one column per named field and one row per case."""
    if len(axes) < 2:
        raise ParameterError("need at least two fields to plot")
    rows = []
    for case in report.get("cases", []):
        if case.get("outputs") is None or "check" in (case.get("inputs") or {}):
            continue
        rows.append({a: _lookup(case, a) for a in axes})
    return rows_to_csv(rows, columns=list(axes))
