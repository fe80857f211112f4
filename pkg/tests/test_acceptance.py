"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Expected values are built from closed forms here, not from library helpers.
"""

import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from wavecat import dsl, optics, scenario
from wavecat.hilbert import StateVector
from wavecat.optics import MODE_SPACE, SYSTEM_SPACE, ToolboxParams
from wavecat.pointer import PointerGrid, WeakRegimeWarning, measure_weak_value
from wavecat.scenario import PROJECTOR_NAMES, ScenarioConfig

pytestmark = pytest.mark.acceptance

PHI = np.pi / 3


def wave_amps(phi):
    return np.exp(1j * phi / 2) * np.array([np.cos(phi / 2), 0, -1j * np.sin(phi / 2), 0])


def particle_amps(phi):
    return np.array([0, 1, 0, np.exp(1j * phi)]) / np.sqrt(2)


def nonzero_expected(alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    return {"R_P": s / (c + s), "L_W": c / (c + s)}


def test_criterion_1_weak_value_table(record_acceptance):
    alphas = [0, np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2]
    t0 = time.perf_counter()
    reports = [scenario.weak_value_report(ScenarioConfig(a, PHI)) for a in alphas]
    elapsed = time.perf_counter() - t0
    worst = 0.0
    for a, rep in zip(alphas, reports):
        want = dict.fromkeys(PROJECTOR_NAMES, 0.0) | nonzero_expected(a)
        worst = max(worst, *(abs(rep.values[n] - want[n]) for n in PROJECTOR_NAMES))
    ok = worst <= 1e-10 and elapsed < 1.0
    record_acceptance(1, ok, f"weak-value table, max err {worst:.2e} (tol 1e-10), {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_2_complementarity(record_acceptance):
    t0 = time.perf_counter()
    reports = [scenario.weak_value_report(ScenarioConfig(float(a), PHI)) for a in np.linspace(0, np.pi / 2, 33)]
    elapsed = time.perf_counter() - t0
    worst = max(max(abs(r.sum_RP_LW - 1), abs(r.sum_all - 1)) for r in reports)
    ok = worst <= 1e-10 and elapsed < 1.0
    record_acceptance(2, ok, f"33-point grid sums, max |sum-1| {worst:.2e} (tol 1e-10), {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_3_balanced_half(record_acceptance):
    rep = scenario.weak_value_report(ScenarioConfig(np.pi / 4, PHI))
    worst = max(abs(rep.values["R_P"] - 0.5), abs(rep.values["L_W"] - 0.5))
    ok = worst <= 1e-12
    record_acceptance(3, ok, f"alpha=pi/4 weak values 1/2, max err {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_4_detector_certainty(record_acceptance):
    cfg = ScenarioConfig(np.pi / 4, PHI)
    post = scenario.post_state(cfg)
    yes = scenario.detector_probabilities(post, cfg)
    err_post = max(abs(yes.p_D1 - 1), yes.p_D2, yes.p_D3)
    rng = np.random.default_rng(20261016)
    f = post.amplitudes
    worst_orth = scenario.detector_probabilities(scenario.orthogonal_post_state(cfg), cfg).p_D1
    for _ in range(500):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v -= f * np.vdot(f, v)
        state = StateVector(SYSTEM_SPACE, v / np.linalg.norm(v))
        worst_orth = max(worst_orth, scenario.detector_probabilities(state, cfg).p_D1)
    ok = err_post <= 1e-10 and worst_orth <= 1e-10
    record_acceptance(
        4, ok, f"post state D1=1 err {err_post:.2e}; 501 orthogonal states max D1 {worst_orth:.2e} (tol 1e-10)"
    )
    assert ok


def test_criterion_5_particle_to_wave_chain(record_acceptance):
    worst = 0.0
    for phi in np.linspace(0, 2 * np.pi, 16, endpoint=False):
        cfg = ScenarioConfig(np.pi / 4, float(phi))
        (_, bs2), (_, sig) = scenario.analyzer_circuit(cfg)[:2]
        start = StateVector(SYSTEM_SPACE, np.kron([0, 1], particle_amps(phi)))
        out = sig.apply(bs2.apply(start))
        want = np.kron([0, 1], wave_amps(phi))
        worst = max(worst, float(np.max(np.abs(out.amplitudes - want))))
    ok = worst <= 1e-12
    record_acceptance(5, ok, f"|R>|P> -> |R>|W> over 16 phases, raw amplitude err {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_6_toolbox(record_acceptance, quiet_unequal_phases):
    worst = 0.0
    for a in np.linspace(0, np.pi / 2, 5):
        for p1 in np.linspace(0, 2 * np.pi, 5):
            for p2 in np.linspace(0, 2 * np.pi, 5):
                out = optics.toolbox(ToolboxParams(float(a), float(p1), float(p2)))
                want = np.cos(a) * wave_amps(p1) + np.sin(a) * particle_amps(p2)
                worst = max(worst, float(np.max(np.abs(out.amplitudes - want))))
    prob_err = 0.0
    for phi in np.linspace(0, 2 * np.pi, 17):
        w = optics.wave_state(float(phi))
        p = optics.particle_state(float(phi))
        prob_err = max(
            prob_err,
            abs(abs(w.amplitude(("1",))) ** 2 - np.cos(phi / 2) ** 2),
            abs(abs(p.amplitude(("2",))) ** 2 - 0.5),
        )
    ok = worst <= 1e-12 and prob_err <= 1e-12
    record_acceptance(
        6, ok, f"toolbox 5x5x5 grid err {worst:.2e}; mode probabilities err {prob_err:.2e} (tol 1e-12)"
    )
    assert ok


def test_criterion_7_pointer_oracle(record_acceptance):
    grid = PointerGrid(801, 8.0, 1.0)
    t0 = time.perf_counter()
    worst = 0.0
    errors = {}
    for a in (np.pi / 6, np.pi / 4, np.pi / 3):
        cfg = ScenarioConfig(a, PHI)
        pre, post = scenario.pre_state(cfg), scenario.post_state(cfg)
        for name, op in scenario.projector_set(cfg).items():
            exact = scenario.weak_value(op, pre, post)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", WeakRegimeWarning)
                e1 = measure_weak_value(pre, post, op, grid, 0.01).value - exact
                e2 = measure_weak_value(pre, post, op, grid, 0.005).value - exact
            worst = max(worst, abs(e1.real), abs(e1.imag))
            errors[(a, name)] = (abs(e1), abs(e2))
    elapsed = time.perf_counter() - t0
    # The O(g^2) bias vanishes identically for zero weak values and at alpha=pi/4;
    # there a ratio is meaningless, so the error must sit at rounding level instead.
    ratios, flat = [], 0.0
    for (a, name), (e1, e2) in errors.items():
        if abs(a - np.pi / 4) < 1e-12 or name not in ("R_P", "L_W"):
            flat = max(flat, e1, e2)
        else:
            ratios.append(e1 / e2)
    ratio_ok = all(3 <= r <= 5 for r in ratios) and flat <= 1e-12
    ok = worst <= 2e-3 and ratio_ok and elapsed < 30
    record_acceptance(
        7,
        ok,
        f"pointer max err {worst:.2e} (tol 2e-3); halving-g ratios "
        f"{min(ratios):.3f}..{max(ratios):.3f} (in [3,5]), zero-bias cases err {flat:.1e}; {elapsed:.2f}s (< 30s)",
    )
    assert ok


def test_criterion_8_monte_carlo(record_acceptance, tmp_path):
    shots, seed = 100_000, 12345
    worst_z = 0.0
    for a in (0.0, np.pi / 6, np.pi / 4, np.pi / 3, np.pi / 2):
        cfg = ScenarioConfig(a, PHI)
        stats = scenario.sample_detectors(scenario.pre_state(cfg), cfg, shots, seed)
        p = ((np.cos(a) + np.sin(a)) / 2) ** 2
        sd = np.sqrt(p * (1 - p) / shots)
        worst_z = max(worst_z, abs(stats.counts[0] / shots - p) / sd)
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        cmd = [sys.executable, "-m", "wavecat", "sample", "--seed", "99", "--shots", str(shots), "--out", str(path)]
        subprocess.run(cmd, check=True, capture_output=True)
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    ok = worst_z <= 4 and same
    record_acceptance(8, ok, f"1e5 shots, worst D1 deviation {worst_z:.2f} sd (<= 4); same-seed CSV identical: {same}")
    assert ok


def _fuzz_inputs(n, rng):
    corpus = [dsl.bundled_path(c).read_bytes() for c in ("toolbox", "figure2")]
    vocab = (
        list(dsl.CATALOG)
        + ["register", "pre", "post", "on", "arm=R", "=", "pi", "-pi/2", "pi/0", "1e999", "nan", "#", "\n", "\r\n"]
        + ["L", "R", "H", "V", "a", "1", "2", "3", "4", "mode", "arm", "pol", "path", "0.5", "\t", "\x00", "é"]
    )
    for i in range(n):
        kind = i % 3
        if kind == 0:
            yield rng.bytes(int(rng.integers(0, 120)))
        elif kind == 1:
            toks = rng.choice(vocab, size=int(rng.integers(0, 40)))
            yield " ".join(toks).encode("utf-8")
        else:
            b = bytearray(corpus[i % 2])
            for _ in range(int(rng.integers(1, 6))):
                op = rng.integers(3)
                j = int(rng.integers(len(b) + 1))
                if op == 0 and b:
                    b[min(j, len(b) - 1)] = int(rng.integers(256))
                elif op == 1:
                    b[j:j] = bytes([int(rng.integers(256))])
                elif b:
                    del b[j : j + int(rng.integers(1, 8))]
            yield bytes(b)


def test_criterion_9_parser_robustness(record_acceptance, cfg):
    rng = np.random.default_rng(9)
    crashes, parsed = [], 0
    for data in _fuzz_inputs(100_000, rng):
        try:
            dsl.parse(data)
            parsed += 1
        except dsl.ParseError:
            pass
        except Exception as exc:  # anything else is a crash
            crashes.append((data, exc))
    ops = dsl.compile_circuit(dsl.load_bundled("figure2"))
    hand = scenario.analyzer_circuit(cfg)
    op_err = max(float(np.max(np.abs(o.matrix - h.matrix))) for o, (_, h) in zip(ops, hand))
    ok = not crashes and len(ops) == len(hand) and op_err <= 1e-12
    record_acceptance(
        9,
        ok,
        f"1e5 fuzz inputs, {len(crashes)} crashes ({parsed} parsed); figure-2 circuit "
        f"{len(ops)}/{len(hand)} ops, max err {op_err:.2e} (tol 1e-12)",
    )
    assert not crashes, crashes[:3]
    assert ok
