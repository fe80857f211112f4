"""Grouped invariant checks behind ``wavecat check``."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import optics, scenario
from .hilbert import LinearOperator, basis_state, tensor
from .optics import ARM_SPACE, SYSTEM_SPACE
from .scenario import ScenarioConfig

ALPHA_GRID = np.linspace(0, np.pi / 2, 33)


@dataclass(frozen=True)
class CheckResult:
    group: str
    passed: bool
    detail: str


def _unitarity(cfg: ScenarioConfig, sigma_perturbation: float) -> CheckResult:
    ops: dict[str, LinearOperator] = {}
    sig = optics.sigma1234().matrix
    if sigma_perturbation:
        sig = sig.copy()
        sig[0, 0] += sigma_perturbation
    ops["Sigma1234"] = LinearOperator(optics.MODE_SPACE, sig)
    for el in optics.toolbox_elements(cfg.toolbox_params):
        ops[f"toolbox:{el.name}"] = el.unitary
    ops["BS3"] = optics.bs3().unitary
    ops["WaveRouter"] = optics.wave_router(cfg.phi1).unitary
    for name, op in scenario.analyzer_circuit(cfg):
        ops[f"analyzer:{name}"] = op
    worst = max(ops, key=lambda k: ops[k].unitarity_error())
    err = ops[worst].unitarity_error()
    return CheckResult("unitarity", err <= 1e-12, f"worst {worst} err={err:.3g}")


def _resolution(cfg: ScenarioConfig) -> CheckResult:
    projs = list(scenario.projector_set(cfg).values())
    total = sum(p.matrix for p in projs)
    err = float(np.max(np.abs(total - np.eye(SYSTEM_SPACE.total_dimension))))
    cross = max(
        float(np.max(np.abs(a.matrix @ b.matrix)))
        for i, a in enumerate(projs)
        for j, b in enumerate(projs)
        if i != j
    )
    ok = err <= 1e-12 and cross <= 1e-12
    return CheckResult("resolution_of_identity", ok, f"sum err={err:.3g}, max cross={cross:.3g}")


def _weak_values(cfg: ScenarioConfig, tol: float) -> CheckResult:
    bad = scenario.weak_value_report(cfg).violations(tol)
    return CheckResult("weak_values", not bad, "; ".join(bad) or f"alpha={cfg.alpha:.6g} all within {tol:g}")


def _complementarity(cfg: ScenarioConfig, tol: float) -> CheckResult:
    worst = 0.0
    for a in ALPHA_GRID:
        rep = scenario.weak_value_report(ScenarioConfig(float(a), cfg.phi1, cfg.phi2))
        worst = max(worst, abs(rep.sum_RP_LW - 1), abs(rep.sum_all - 1))
    return CheckResult("complementarity", worst <= tol, f"33-point grid, max |sum - 1| = {worst:.3g}")


def _particle_to_wave(cfg: ScenarioConfig) -> CheckResult:
    r = basis_state(ARM_SPACE, ("R",))
    state = tensor(r, optics.particle_state(cfg.phi2))
    bs2, sigma = (op for _, op in scenario.analyzer_circuit(cfg)[:2])
    out = sigma.apply(bs2.apply(state))
    want = tensor(r, optics.wave_state(cfg.phi1))
    err = float(np.max(np.abs(out.amplitudes - want.amplitudes)))
    return CheckResult("particle_to_wave", err <= 1e-12, f"raw amplitude err={err:.3g}")


def _detector_certainty(cfg: ScenarioConfig) -> CheckResult:
    yes = scenario.detector_probabilities(scenario.post_state(cfg), cfg)
    no = scenario.detector_probabilities(scenario.orthogonal_post_state(cfg), cfg)
    ok = abs(yes.p_D1 - 1) <= 1e-10 and yes.p_D2 <= 1e-10 and yes.p_D3 <= 1e-10 and no.p_D1 <= 1e-10
    return CheckResult(
        "detector_certainty", ok, f"post: D1={yes.p_D1:.12g}; orthogonal: D1={no.p_D1:.3g}"
    )


def _toolbox(cfg: ScenarioConfig) -> CheckResult:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", optics.UnequalPhaseWarning)
        out = optics.toolbox(cfg.toolbox_params)
    c, s = np.cos(cfg.alpha), np.sin(cfg.alpha)
    want = optics.wave_state(cfg.phi1).scaled(c) + optics.particle_state(cfg.phi2).scaled(s)
    err = float(np.max(np.abs(out.amplitudes - want.amplitudes)))
    return CheckResult("toolbox", err <= 1e-12, f"raw amplitude err={err:.3g}")


def run_checks(
    cfg: ScenarioConfig | None = None, tol: float = 1e-10, sigma_perturbation: float = 0.0
) -> list[CheckResult]:
    """Evaluate every invariant group; never raises on a failing group."""
    cfg = cfg or ScenarioConfig()
    groups = [
        ("unitarity", lambda: _unitarity(cfg, sigma_perturbation)),
        ("resolution_of_identity", lambda: _resolution(cfg)),
        ("weak_values", lambda: _weak_values(cfg, tol)),
        ("complementarity", lambda: _complementarity(cfg, tol)),
        ("particle_to_wave", lambda: _particle_to_wave(cfg)),
        ("detector_certainty", lambda: _detector_certainty(cfg)),
        ("toolbox", lambda: _toolbox(cfg)),
    ]
    results = []
    for name, fn in groups:
        try:
            results.append(fn())
        except Exception as exc:  # a crashing group counts as failing
            results.append(CheckResult(name, False, f"error: {exc}"))
    return results


__all__ = ["CheckResult", "run_checks", "ALPHA_GRID"]
