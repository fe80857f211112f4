"""Optical elements and the wave-particle toolbox.

Every element is a unitary on a small register space. The standard
registers are ``arm`` (L, R), ``mode`` (1..4), ``pol`` (H, V) and, inside
the toolbox only, ``path`` (a, 1..4) where ``a`` is the input port.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    ATOL,
    CompositeSpace,
    HilbertError,
    LinearOperator,
    Register,
    StateVector,
    basis_state,
    embed,
    superpose,
)

ARM = Register("arm", ("L", "R"))
MODE = Register("mode", ("1", "2", "3", "4"))
POL = Register("pol", ("H", "V"))
PATH = Register("path", ("a", "1", "2", "3", "4"))

MODE_SPACE = CompositeSpace.of(MODE)
ARM_SPACE = CompositeSpace.of(ARM)
SYSTEM_SPACE = CompositeSpace.of(ARM, MODE)
TOOLBOX_SPACE = CompositeSpace.of(POL, PATH)

_SQRT1_2 = 1 / np.sqrt(2)
BALANCED = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2

ELEMENT_NAMES = ("PBS", "HWP", "BS_sym", "BS3", "PhaseShifter", "Sigma1234", "WaveRouter")


class UnequalPhaseWarning(UserWarning):
    """Raised as a warning when phi1 != phi2."""


@dataclass(frozen=True)
class Element:
    name: str
    unitary: LinearOperator
    acted_registers: tuple[str, ...]

    def __post_init__(self):
        if self.name not in ELEMENT_NAMES:
            raise HilbertError(f"unknown element {self.name!r}")
        if not self.unitary.is_unitary(ATOL):
            raise HilbertError(f"element {self.name} is not unitary")

    @property
    def matrix(self) -> np.ndarray:
        return self.unitary.matrix

    def on(self, space: CompositeSpace) -> LinearOperator:
        """This element as an operator on a larger space."""
        return embed(self.unitary, self.acted_registers, space)


def _element(name: str, space: CompositeSpace, matrix: np.ndarray) -> Element:
    return Element(name, LinearOperator(space, matrix, "unitary"), space.names)


def _two_port(register: Register, ports, block: np.ndarray) -> np.ndarray:
    m, n = (str(p) for p in ports)
    if m == n:
        raise HilbertError(f"beam splitter ports must differ, got ({m}, {n})")
    i, j = register.index(m), register.index(n)
    u = np.eye(register.dimension, dtype=complex)
    u[np.ix_([i, j], [i, j])] = block
    return u


def _pol_path_swap(path: Register, pairs) -> np.ndarray:
    """Permutation on pol (x) path swapping (pol, p) <-> (pol, q) for each pair."""
    space = CompositeSpace.of(POL, path)
    n = space.total_dimension
    perm = np.arange(n)
    for pol, p, q in pairs:
        i, j = space.index((pol, p)), space.index((pol, q))
        perm[i], perm[j] = j, i
    u = np.zeros((n, n), dtype=complex)
    u[perm, np.arange(n)] = 1.0
    return u


def pbs(ports=("a", "1", "2"), path: Register = PATH) -> Element:
    """Polarizing beam splitter: H from ``a`` exits at ``1``, V exits at ``2``.

    Only the two input mappings are physical; the reverse mappings complete
    the permutation so the element is unitary on the whole pol x path space.
    """
    a, h_out, v_out = (str(p) for p in ports)
    if len({a, h_out, v_out}) != 3:
        raise HilbertError(f"PBS ports must be distinct, got {ports}")
    for p in (a, h_out, v_out):
        path.index(p)
    u = _pol_path_swap(path, [("H", a, h_out), ("V", a, v_out)])
    return _element("PBS", CompositeSpace.of(POL, path), u)


def hwp(port="1", path: Register = PATH) -> Element:
    """Half-wave plate flipping H <-> V on a single path."""
    space = CompositeSpace.of(POL, path)
    port = str(port)
    path.index(port)
    n = space.total_dimension
    perm = np.arange(n)
    i, j = space.index(("H", port)), space.index(("V", port))
    perm[i], perm[j] = j, i
    u = np.zeros((n, n), dtype=complex)
    u[perm, np.arange(n)] = 1.0
    return _element("HWP", space, u)


def hwp_path1() -> Element:
    return hwp("1")


def bs_sym(ports=("1", "3"), register: Register = MODE) -> Element:
    """Balanced splitter ``[[1, 1], [1, -1]]/sqrt(2)`` on ports (m, n); the n port takes the sign."""
    u = _two_port(register, ports, BALANCED)
    return _element("BS_sym", CompositeSpace.of(register), u)


def phase_shifter(mode="3", phi: float = 0.0, register: Register = MODE) -> Element:
    u = np.eye(register.dimension, dtype=complex)
    k = register.index(str(mode))
    u[k, k] = np.exp(1j * phi)
    return _element("PhaseShifter", CompositeSpace.of(register), u)


def sigma1234() -> Element:
    u = np.array(
        [
            [0, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
        ],
        dtype=complex,
    )
    return _element("Sigma1234", MODE_SPACE, u)


def bs3() -> Element:
    # columns: L -> (R - L)/sqrt2, R -> (R + L)/sqrt2
    u = np.array([[-1, 1], [1, 1]], dtype=complex) * _SQRT1_2
    return _element("BS3", ARM_SPACE, u)


def wave_state(phi1: float) -> StateVector:
    half = phi1 / 2
    amps = np.exp(1j * half) * np.array([np.cos(half), 0, -1j * np.sin(half), 0])
    return StateVector(MODE_SPACE, amps)


def particle_state(phi2: float) -> StateVector:
    amps = np.array([0, 1, 0, np.exp(1j * phi2)]) * _SQRT1_2
    return StateVector(MODE_SPACE, amps)


def wave_complement(phi1: float) -> StateVector:
    """Orthogonal partner of the wave state inside span{1, 3}."""
    half = phi1 / 2
    amps = np.exp(1j * half) * np.array([np.sin(half), 0, 1j * np.cos(half), 0])
    return StateVector(MODE_SPACE, amps)


def particle_complement(phi2: float) -> StateVector:
    """Orthogonal partner of the particle state inside span{2, 4}."""
    amps = np.array([0, 1, 0, -np.exp(1j * phi2)]) * _SQRT1_2
    return StateVector(MODE_SPACE, amps)


TRANSMIT_PORTS = ("1",)
REFLECT_PORTS = ("2", "3", "4")


def wave_router(phi1: float) -> Element:
    """Two-outcome router for the wave projector.

    The wave state exits at the transmit port (mode 1). Its complement is
    sent to mode 3 and the particle span {2, 4} passes unchanged; modes
    2, 3 and 4 together form the reflect output.
    """
    w, wbar = wave_state(phi1).amplitudes, wave_complement(phi1).amplitudes
    e = np.eye(4, dtype=complex)
    u = np.outer(e[0], w.conj()) + np.outer(e[2], wbar.conj()) + np.outer(e[1], e[1]) + np.outer(e[3], e[3])
    return _element("WaveRouter", MODE_SPACE, u)


def transmit_probability(state: StateVector, phi1: float) -> float:
    out = wave_router(phi1).unitary.apply(state)
    return float(sum(abs(out.amplitude((p,))) ** 2 for p in TRANSMIT_PORTS))


@dataclass(frozen=True)
class ToolboxParams:
    alpha: float
    phi1: float
    phi2: float | None = None

    def __post_init__(self):
        if self.phi2 is None:
            object.__setattr__(self, "phi2", self.phi1)

    @property
    def phases_matched(self) -> bool:
        return bool(np.isclose(self.phi1, self.phi2, rtol=0, atol=ATOL))


def toolbox_input(alpha: float) -> StateVector:
    """(cos a |H> + sin a |V>) |a> on pol x path."""
    h = basis_state(TOOLBOX_SPACE, ("H", "a"))
    v = basis_state(TOOLBOX_SPACE, ("V", "a"))
    return superpose([(np.cos(alpha), h), (np.sin(alpha), v)])


def toolbox_elements(params: ToolboxParams) -> list[Element]:
    """The toolbox pipeline in application order."""
    return [
        pbs(("a", "1", "2")),
        hwp("1"),
        bs_sym(("1", "3"), PATH),
        bs_sym(("2", "4"), PATH),
        phase_shifter("3", params.phi1, PATH),
        phase_shifter("4", params.phi2, PATH),
        bs_sym(("1", "3"), PATH),
    ]


def drop_polarization(state: StateVector, atol: float = 1e-10) -> StateVector:
    """Factor out a product polarization and the empty input port.

    Raises if polarization is entangled with the path (reduced purity < 1)
    or if the input port still carries amplitude. The polarization factor
    is phased so its largest component is real and positive.
    """
    t = state.tensor()  # axes (pol, path)
    rho = t @ t.conj().T
    purity = float(np.real(np.trace(rho @ rho))) / float(np.real(np.trace(rho))) ** 2
    if abs(purity - 1.0) > atol:
        raise HilbertError(f"polarization is not separable (purity={purity:.12g})")
    _, vecs = np.linalg.eigh(rho)
    pol = vecs[:, -1]
    k = int(np.argmax(np.abs(pol)))
    pol = pol * (abs(pol[k]) / pol[k])
    path_amps = pol.conj() @ t
    if abs(path_amps[0]) > atol:
        raise HilbertError("input port 'a' still populated after the toolbox")
    return StateVector(MODE_SPACE, path_amps[1:])


def toolbox(params: ToolboxParams) -> StateVector:
    """Run the toolbox and return the mode-register output state."""
    if not params.phases_matched:
        warnings.warn("phi1 != phi2: not the setting analysed for the flagship protocol", UnequalPhaseWarning)
    state = toolbox_input(params.alpha)
    for el in toolbox_elements(params):
        state = el.on(TOOLBOX_SPACE).apply(state)
    return drop_polarization(state)
