"""Pre/post-selected spatial separation of wave and particle attributes.

The photon leaves the toolbox in ``cos(a)|W> + sin(a)|P>``, is split over
the two arms by BS1, and is post-selected on ``(|L>|W> + |R>|P>)/sqrt2``.
Weak values of the eight arm x attribute projectors are evaluated here
analytically; :mod:`wavecat.pointer` recovers them by simulated measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import optics
from .hilbert import (
    ATOL,
    HilbertError,
    LinearOperator,
    NormalizationError,
    StateVector,
    basis_state,
    controlled_embed,
    embed,
    identity,
    inner,
    projector,
    tensor,
)
from .optics import ARM, ARM_SPACE, SYSTEM_SPACE, ToolboxParams

OVERLAP_THRESHOLD = 1e-12

# Projector names: <arm>_<attribute>, with "bar" marking the complement.
PROJECTOR_NAMES = ("L_W", "L_Wbar", "L_P", "L_Pbar", "R_W", "R_Wbar", "R_P", "R_Pbar")


class VanishingOverlapError(HilbertError):
    def __init__(self, overlap: float):
        super().__init__(f"pre/post overlap {overlap:.3e} is too small for a weak value")
        self.overlap = overlap


@dataclass(frozen=True)
class ScenarioConfig:
    alpha: float = np.pi / 4
    phi1: float = np.pi / 3
    phi2: float | None = None

    def __post_init__(self):
        if self.phi2 is None:
            object.__setattr__(self, "phi2", self.phi1)

    @property
    def phases_matched(self) -> bool:
        return bool(np.isclose(self.phi1, self.phi2, rtol=0, atol=ATOL))

    @property
    def toolbox_params(self) -> ToolboxParams:
        return ToolboxParams(self.alpha, self.phi1, self.phi2)

    def expected_overlap(self) -> float:
        return (np.cos(self.alpha) + np.sin(self.alpha)) / 2


def _arm(label: str) -> StateVector:
    return basis_state(ARM_SPACE, (label,))


def attribute_states(cfg: ScenarioConfig) -> dict[str, StateVector]:
    """The orthonormal mode basis {W, Wbar, P, Pbar} for this configuration."""
    return {
        "W": optics.wave_state(cfg.phi1),
        "Wbar": optics.wave_complement(cfg.phi1),
        "P": optics.particle_state(cfg.phi2),
        "Pbar": optics.particle_complement(cfg.phi2),
    }


def bs1() -> optics.Element:
    """Balanced splitter sending the arm input |L> to (|L> + |R>)/sqrt2."""
    return optics.bs_sym(("L", "R"), ARM)


def pre_state(cfg: ScenarioConfig) -> StateVector:
    out = optics.toolbox(cfg.toolbox_params)
    state = tensor(_arm("L"), out)
    return bs1().on(SYSTEM_SPACE).apply(state)


def post_state(cfg: ScenarioConfig) -> StateVector:
    s = attribute_states(cfg)
    lw = tensor(_arm("L"), s["W"])
    rp = tensor(_arm("R"), s["P"])
    return (lw + rp).scaled(1 / np.sqrt(2))


def orthogonal_post_state(cfg: ScenarioConfig) -> StateVector:
    """(|L>|W> - |R>|P>)/sqrt2, a state the analyzer must never send to D1."""
    s = attribute_states(cfg)
    return (tensor(_arm("L"), s["W"]) - tensor(_arm("R"), s["P"])).scaled(1 / np.sqrt(2))


def projector_set(cfg: ScenarioConfig) -> dict[str, LinearOperator]:
    attrs = attribute_states(cfg)
    out = {}
    for name in PROJECTOR_NAMES:
        arm, attr = name.split("_")
        out[name] = projector(tensor(_arm(arm), attrs[attr]))
    return out


def arm_projector(label: str) -> LinearOperator:
    """|arm><arm| (x) I on arm x mode."""
    return embed(projector(_arm(label)), ["arm"], SYSTEM_SPACE)


def weak_value(op: LinearOperator, pre: StateVector, post: StateVector) -> complex:
    """<post|op|pre> / <post|pre>."""
    overlap = inner(post, pre)
    if abs(overlap) <= OVERLAP_THRESHOLD:
        raise VanishingOverlapError(abs(overlap))
    return inner(post, op.apply(pre)) / overlap


@dataclass(frozen=True)
class WeakValueReport:
    config: ScenarioConfig
    values: dict[str, complex]
    sum_all: complex
    sum_RP_LW: complex
    postselection_probability: float
    overlap: complex = field(repr=False, default=0j)

    def expected(self) -> dict[str, float]:
        """Closed-form predictions for every projector."""
        c, s = np.cos(self.config.alpha), np.sin(self.config.alpha)
        exp = {name: 0.0 for name in PROJECTOR_NAMES}
        exp["R_P"] = s / (c + s)
        exp["L_W"] = c / (c + s)
        return exp

    def violations(self, tol: float = 1e-10) -> list[str]:
        """Identities that fail at ``tol``; empty when everything holds."""
        bad = []
        for name, want in self.expected().items():
            err = abs(self.values[name] - want)
            if err > tol:
                bad.append(f"{name}: |{self.values[name]:.6g} - {want:.6g}| = {err:.3g}")
        if abs(self.sum_all - 1) > tol:
            bad.append(f"sum_all = {self.sum_all:.12g}")
        if abs(self.sum_RP_LW - 1) > tol:
            bad.append(f"sum_RP_LW = {self.sum_RP_LW:.12g}")
        if abs(self.postselection_probability - abs(self.overlap) ** 2) > tol:
            bad.append("postselection_probability != |overlap|^2")
        return bad


def weak_value_report(cfg: ScenarioConfig) -> WeakValueReport:
    pre, post = pre_state(cfg), post_state(cfg)
    projs = projector_set(cfg)
    values = {name: weak_value(p, pre, post) for name, p in projs.items()}
    overlap = inner(post, pre)
    return WeakValueReport(
        config=cfg,
        values=values,
        sum_all=sum(values.values()),
        sum_RP_LW=values["R_P"] + values["L_W"],
        postselection_probability=abs(overlap) ** 2,
        overlap=overlap,
    )


# -- analyzer -----------------------------------------------------------------

ANALYZER_STAGES = ("BS2", "Sigma1234", "BS3", "WaveRouter")


def analyzer_circuit(cfg: ScenarioConfig) -> list[tuple[str, LinearOperator]]:
    """The post-selection optics as (stage name, operator on arm x mode), in order.

    BS2 mixes modes 2 and 4 on the right arm only, the mode permutation
    follows on the right arm, BS3 mixes the arms, and the wave router sits
    in the right arm in front of D1/D3.
    """
    return [
        ("BS2", controlled_embed("arm", "R", optics.bs_sym(("2", "4")).unitary, SYSTEM_SPACE)),
        ("Sigma1234", controlled_embed("arm", "R", optics.sigma1234().unitary, SYSTEM_SPACE)),
        ("BS3", optics.bs3().on(SYSTEM_SPACE)),
        ("WaveRouter", controlled_embed("arm", "R", optics.wave_router(cfg.phi1).unitary, SYSTEM_SPACE)),
    ]


def analyzer_unitary(cfg: ScenarioConfig) -> LinearOperator:
    u = identity(SYSTEM_SPACE)
    for _, op in analyzer_circuit(cfg):
        u = op @ u
    return u


def run_pipeline(ops, state: StateVector) -> StateVector:
    for op in ops:
        state = op.apply(state)
    return state


@dataclass(frozen=True)
class DetectorStats:
    p_D1: float
    p_D2: float
    p_D3: float
    shots: int = 0
    counts: tuple[int, int, int] | None = None

    @property
    def probabilities(self) -> tuple[float, float, float]:
        return (self.p_D1, self.p_D2, self.p_D3)

    @property
    def frequencies(self) -> tuple[float, float, float] | None:
        if not self.counts:
            return None
        return tuple(c / self.shots for c in self.counts)


DETECTORS = ("D1", "D2", "D3")


def detector_probabilities_from_output(out: StateVector) -> DetectorStats:
    """Born probabilities of the three detectors for an analyzer output state.

    D1 is the right-arm transmit port, D2 collects the whole left arm and
    D3 the right-arm reflect ports.
    """
    p = {lab: abs(out.amplitude(lab)) ** 2 for lab in SYSTEM_SPACE.basis()}
    p1 = sum(p[("R", m)] for m in optics.TRANSMIT_PORTS)
    p2 = sum(v for (arm, _), v in p.items() if arm == "L")
    p3 = sum(p[("R", m)] for m in optics.REFLECT_PORTS)
    return DetectorStats(float(p1), float(p2), float(p3))


def detector_probabilities(state: StateVector, cfg: ScenarioConfig) -> DetectorStats:
    if state.space != SYSTEM_SPACE:
        raise HilbertError(f"detector input must live on arm x mode, got {state.space.names}")
    if not state.is_normalized(1e-10):
        raise NormalizationError(f"detector input is not normalized (norm={state.norm:.12g})")
    out = run_pipeline([op for _, op in analyzer_circuit(cfg)], state)
    return detector_probabilities_from_output(out)


def sample_detectors(state: StateVector, cfg: ScenarioConfig, shots: int, seed: int) -> DetectorStats:
    """Multinomial detector counts from a counter-based (Philox) generator."""
    if int(shots) < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    stats = detector_probabilities(state, cfg)
    p = np.clip(np.array(stats.probabilities), 0.0, None)
    p = p / p.sum()
    rng = np.random.Generator(np.random.Philox(int(seed)))
    counts = rng.multinomial(int(shots), p)
    return DetectorStats(stats.p_D1, stats.p_D2, stats.p_D3, int(shots), tuple(int(c) for c in counts))
