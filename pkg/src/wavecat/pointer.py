"""Von Neumann weak measurement with a discretized Gaussian pointer.

The coupling ``exp(-i g A (x) p)`` for a projector ``A`` translates the
pointer by ``g`` on the ``A = 1`` eigenspace. Translation is applied as a
diagonal phase in the discrete momentum representation, so any real ``g``
is handled without interpolation. After post-selection the pointer mean
position gives ``g * Re(A_w)`` and the mean momentum gives
``g * Im(A_w) / (2 sigma^2)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hilbert import (
    CompositeSpace,
    HilbertError,
    LinearOperator,
    Register,
    StateVector,
)
from .scenario import ScenarioConfig, post_state, pre_state

DEFAULT_SIGMA = 1.0
DEFAULT_EXTENT = 8.0
DEFAULT_POINTS = 801
DEFAULT_G = 0.01


class WeakRegimeWarning(UserWarning):
    pass


class PostSelectionError(HilbertError):
    pass


@dataclass(frozen=True)
class PointerGrid:
    n_points: int = DEFAULT_POINTS
    extent: float = DEFAULT_EXTENT
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if int(self.n_points) < 3:
            raise HilbertError(f"pointer grid needs at least 3 points, got {self.n_points}")
        if not self.sigma > 0:
            raise HilbertError(f"pointer width must be positive, got {self.sigma}")
        if self.extent < 6 * self.sigma:
            raise HilbertError(
                f"extent {self.extent} < 6 sigma = {6 * self.sigma}; Gaussian tails would be truncated"
            )

    @property
    def spacing(self) -> float:
        return 2 * self.extent / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @cached_property
    def register(self) -> Register:
        return Register("pointer", tuple(f"x{i}" for i in range(self.n_points)))

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace.of(self.register)

    def translate(self, amps: np.ndarray, shift: float) -> np.ndarray:
        """psi(x) -> psi(x - shift) along the last axis."""
        return np.fft.ifft(np.fft.fft(amps, axis=-1) * np.exp(-1j * self.k * shift), axis=-1)

    def mean_position(self, amps: np.ndarray) -> float:
        p = np.abs(amps) ** 2
        return float(np.sum(self.x * p) / np.sum(p))

    def mean_momentum(self, amps: np.ndarray) -> float:
        p = np.abs(np.fft.fft(amps)) ** 2
        return float(np.sum(self.k * p) / np.sum(p))

    def variance(self, amps: np.ndarray) -> float:
        p = np.abs(amps) ** 2
        p = p / p.sum()
        mu = np.sum(self.x * p)
        return float(np.sum((self.x - mu) ** 2 * p))


@dataclass(frozen=True)
class CouplingParams:
    g: float
    observable: LinearOperator

    def weak_regime(self, sigma: float) -> bool:
        return abs(self.g) <= sigma / 50


def gaussian_pointer(grid: PointerGrid) -> StateVector:
    amps = np.exp(-(grid.x**2) / (4 * grid.sigma**2))
    return StateVector(grid.space, amps / np.linalg.norm(amps))


def weak_couple(
    system: StateVector, pointer: StateVector, params: CouplingParams, grid: PointerGrid
) -> StateVector:
    """Joint state ``(1 - A)|s>|ptr> + A|s> T_g|ptr>`` on system x pointer."""
    A = params.observable
    if A.space != system.space:
        raise HilbertError("observable and system state live on different spaces")
    if not A.is_projector(1e-10):
        raise HilbertError("weak_couple needs a projector observable")
    if pointer.space != grid.space:
        raise HilbertError("pointer state does not live on the given grid")
    if abs(params.g) > grid.extent / 2:
        raise HilbertError(f"coupling g={params.g} exceeds half the grid extent ({grid.extent / 2})")
    on = A.matrix @ system.amplitudes
    off = system.amplitudes - on
    shifted = grid.translate(pointer.amplitudes, params.g)
    joint = np.outer(off, pointer.amplitudes) + np.outer(on, shifted)
    space = CompositeSpace(system.space.registers + (grid.register,))
    return StateVector(space, joint.reshape(-1))


def post_select_pointer(joint: StateVector, post: StateVector) -> tuple[StateVector, float]:
    """Condition the pointer on the system being found in ``post``.

    Returns the renormalized pointer state and the success probability.
    """
    n_sys = len(post.space.registers)
    if joint.space.registers[:n_sys] != post.space.registers or len(joint.space.registers) != n_sys + 1:
        raise HilbertError("post-selection state does not match the system factor of the joint state")
    ptr_reg = joint.space.registers[-1]
    m = joint.amplitudes.reshape(post.space.total_dimension, ptr_reg.dimension)
    cond = post.amplitudes.conj() @ m
    prob = float(np.vdot(cond, cond).real)
    if prob <= 1e-24:
        raise PostSelectionError(f"post-selection probability vanishes ({prob:.3e})")
    return StateVector(CompositeSpace.of(ptr_reg), cond / np.sqrt(prob)), prob


@dataclass(frozen=True)
class PointerEstimate:
    value: complex
    postselection_probability: float
    mean_position: float
    mean_momentum: float


def measure_weak_value(
    pre: StateVector,
    post: StateVector,
    observable: LinearOperator,
    grid: PointerGrid | None = None,
    g: float = DEFAULT_G,
) -> PointerEstimate:
    grid = grid or PointerGrid()
    params = CouplingParams(g, observable)
    if not params.weak_regime(grid.sigma):
        warnings.warn(f"g={g} is outside the weak regime (g <= sigma/50)", WeakRegimeWarning)
    if g == 0:
        raise HilbertError("coupling g must be nonzero to read a weak value")
    joint = weak_couple(pre, gaussian_pointer(grid), params, grid)
    ptr, prob = post_select_pointer(joint, post)
    x_mean = grid.mean_position(ptr.amplitudes)
    p_mean = grid.mean_momentum(ptr.amplitudes)
    value = complex(x_mean / g, 2 * grid.sigma**2 * p_mean / g)
    return PointerEstimate(value, prob, x_mean, p_mean)


def estimate_weak_value(
    cfg: ScenarioConfig,
    projector: LinearOperator,
    grid: PointerGrid | None = None,
    g: float = DEFAULT_G,
) -> complex:
    """Pointer-read weak value of ``projector`` for the flagship pre/post pair."""
    return measure_weak_value(pre_state(cfg), post_state(cfg), projector, grid, g).value
