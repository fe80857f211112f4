"""Labeled tensor-product spaces, state vectors and dense operators.

Basis ordering is row-major over registers in declaration order: the first
register varies slowest, exactly like ``np.kron(a, b)`` for ``a`` on the
first register and ``b`` on the second.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-12

__all__ = [
    "ATOL",
    "HilbertError",
    "UnknownLabelError",
    "SpaceMismatchError",
    "NormalizationError",
    "OperatorKindError",
    "Register",
    "CompositeSpace",
    "StateVector",
    "LinearOperator",
    "basis_state",
    "superpose",
    "inner",
    "embed",
    "controlled_embed",
    "fidelity_up_to_phase",
    "tensor",
    "identity",
    "projector",
]


class HilbertError(ValueError):
    pass


class UnknownLabelError(HilbertError):
    pass


class SpaceMismatchError(HilbertError):
    pass


class NormalizationError(HilbertError):
    pass


class OperatorKindError(HilbertError):
    pass


@dataclass(frozen=True)
class Register:
    """A single tensor factor with named basis vectors."""

    name: str
    basis_labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.basis_labels)
        object.__setattr__(self, "basis_labels", labels)
        if not self.name or not str(self.name).isidentifier():
            raise HilbertError(f"register name must be an identifier, got {self.name!r}")
        if not labels:
            raise HilbertError(f"register {self.name!r} has no basis labels")
        if len(set(labels)) != len(labels):
            raise HilbertError(f"register {self.name!r} has duplicate labels: {labels}")

    @property
    def dimension(self) -> int:
        return len(self.basis_labels)

    def index(self, label: str) -> int:
        try:
            return self.basis_labels.index(str(label))
        except ValueError:
            raise UnknownLabelError(
                f"unknown label {label!r} for register {self.name!r} "
                f"(expected one of {', '.join(self.basis_labels)})"
            ) from None


@dataclass(frozen=True)
class CompositeSpace:
    registers: tuple[Register, ...]

    def __post_init__(self):
        regs = tuple(self.registers)
        object.__setattr__(self, "registers", regs)
        if not regs:
            raise HilbertError("a composite space needs at least one register")
        names = [r.name for r in regs]
        if len(set(names)) != len(names):
            raise HilbertError(f"duplicate register names: {names}")

    @classmethod
    def of(cls, *registers: Register) -> "CompositeSpace":
        return cls(tuple(registers))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dimension for r in self.registers)

    @property
    def total_dimension(self) -> int:
        return int(np.prod(self.dims))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)

    def register(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise UnknownLabelError(f"no register named {name!r} in space {self.names}")

    def position(self, name: str) -> int:
        self.register(name)
        return self.names.index(name)

    def index(self, labels: Sequence[str]) -> int:
        """Flat basis index for one label per register."""
        labels = list(labels)
        if len(labels) != len(self.registers):
            raise HilbertError(
                f"expected {len(self.registers)} labels ({', '.join(self.names)}), got {len(labels)}"
            )
        idx = 0
        for reg, lab in zip(self.registers, labels):
            idx = idx * reg.dimension + reg.index(lab)
        return idx

    def labels(self, index: int) -> tuple[str, ...]:
        if not 0 <= index < self.total_dimension:
            raise HilbertError(f"basis index {index} out of range [0, {self.total_dimension})")
        out = []
        for reg in reversed(self.registers):
            index, r = divmod(index, reg.dimension)
            out.append(reg.basis_labels[r])
        return tuple(reversed(out))

    def basis(self) -> Iterable[tuple[str, ...]]:
        return itertools.product(*(r.basis_labels for r in self.registers))

    def subspace(self, names: Sequence[str]) -> "CompositeSpace":
        return CompositeSpace(tuple(self.register(n) for n in names))


def _check_same_space(a: CompositeSpace, b: CompositeSpace):
    if a != b:
        raise SpaceMismatchError(f"space mismatch: {a.names} vs {b.names}")


@dataclass(frozen=True, eq=False)
class StateVector:
    space: CompositeSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.space.total_dimension:
            raise HilbertError(
                f"amplitude vector has length {amps.shape[0]}, space needs {self.space.total_dimension}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = ATOL) -> bool:
        return abs(self.norm - 1.0) <= atol

    def normalized(self) -> "StateVector":
        n = self.norm
        if n < ATOL:
            raise NormalizationError("cannot normalize a (numerically) zero vector")
        return StateVector(self.space, self.amplitudes / n)

    def amplitude(self, labels: Sequence[str]) -> complex:
        return complex(self.amplitudes[self.space.index(labels)])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per register."""
        return self.amplitudes.reshape(self.space.dims)

    def marginal(self, name: str) -> np.ndarray:
        """Born probabilities of a single register, summed over the others."""
        pos = self.space.position(name)
        probs = np.abs(self.tensor()) ** 2
        axes = tuple(i for i in range(len(self.space.registers)) if i != pos)
        return probs.sum(axis=axes)

    def scaled(self, c: complex) -> "StateVector":
        return StateVector(self.space, c * self.amplitudes)

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_space(self.space, other.space)
        return StateVector(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_space(self.space, other.space)
        return StateVector(self.space, self.amplitudes - other.amplitudes)

    def __rmul__(self, c) -> "StateVector":
        return self.scaled(c)

    def allclose(self, other: "StateVector", atol: float = ATOL) -> bool:
        """Raw amplitude comparison, global phase included."""
        _check_same_space(self.space, other.space)
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= atol)


_KINDS = ("unitary", "projector", "hermitian", "general")


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def _classify(m: np.ndarray, atol: float) -> str:
    eye = np.eye(m.shape[0])
    herm = _max_abs(m - m.conj().T) <= atol
    if herm and _max_abs(m @ m - m) <= atol:
        return "projector"
    if _max_abs(m.conj().T @ m - eye) <= atol:
        return "unitary"
    return "hermitian" if herm else "general"


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Dense complex matrix on a composite space.

    If ``kind`` is left as ``None`` it is inferred; an explicitly requested
    ``unitary`` or ``projector`` kind is verified and rejected when the
    matrix does not satisfy it to ``ATOL``.
    """

    space: CompositeSpace
    matrix: np.ndarray = field(repr=False)
    kind: str | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n = self.space.total_dimension
        if m.shape != (n, n):
            raise HilbertError(f"matrix shape {m.shape} does not match space dimension {n}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.kind is None:
            object.__setattr__(self, "kind", _classify(m, ATOL))
            return
        if self.kind not in _KINDS:
            raise OperatorKindError(f"unknown operator kind {self.kind!r}")
        if self.kind == "unitary" and not self.is_unitary():
            raise OperatorKindError(f"matrix is not unitary (err={self.unitarity_error():.3g})")
        if self.kind == "projector" and not self.is_projector():
            raise OperatorKindError("matrix is not an orthogonal projector")
        if self.kind == "hermitian" and _max_abs(m - m.conj().T) > ATOL:
            raise OperatorKindError("matrix is not hermitian")

    def unitarity_error(self) -> float:
        m = self.matrix
        return _max_abs(m.conj().T @ m - np.eye(m.shape[0]))

    def is_unitary(self, atol: float = ATOL) -> bool:
        return self.unitarity_error() <= atol

    def is_projector(self, atol: float = ATOL) -> bool:
        m = self.matrix
        return _max_abs(m @ m - m) <= atol and _max_abs(m - m.conj().T) <= atol

    @property
    def dagger(self) -> "LinearOperator":
        kind = self.kind if self.kind != "general" else None
        return LinearOperator(self.space, self.matrix.conj().T, kind)

    def apply(self, state: StateVector) -> StateVector:
        _check_same_space(self.space, state.space)
        return StateVector(self.space, self.matrix @ state.amplitudes)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            return self.apply(other)
        _check_same_space(self.space, other.space)
        kind = "unitary" if self.kind == other.kind == "unitary" else None
        return LinearOperator(self.space, self.matrix @ other.matrix, kind)

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_space(self.space, other.space)
        return LinearOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        _check_same_space(self.space, other.space)
        return LinearOperator(self.space, self.matrix - other.matrix)

    def expectation(self, state: StateVector) -> complex:
        return inner(state, self.apply(state))

    def allclose(self, other: "LinearOperator", atol: float = ATOL) -> bool:
        _check_same_space(self.space, other.space)
        return _max_abs(self.matrix - other.matrix) <= atol


def identity(space: CompositeSpace) -> LinearOperator:
    return LinearOperator(space, np.eye(space.total_dimension), "unitary")


def projector(state: StateVector) -> LinearOperator:
    """|s><s| for a normalized state."""
    if not state.is_normalized(1e-10):
        raise NormalizationError(f"projector needs a normalized state (norm={state.norm:.6g})")
    a = state.amplitudes
    return LinearOperator(state.space, np.outer(a, a.conj()), "projector")


def basis_state(space: CompositeSpace, labels: Sequence[str]) -> StateVector:
    amps = np.zeros(space.total_dimension, dtype=complex)
    amps[space.index(labels)] = 1.0
    return StateVector(space, amps)


def superpose(terms: Sequence[tuple[complex, StateVector]], normalize: bool = False) -> StateVector:
    """Linear combination of states sharing one space.

    Args:
        terms: ``(coefficient, state)`` pairs.
        normalize: Rescale the result to unit norm; a zero result raises
            :class:`NormalizationError`.
    """
    if not terms:
        raise HilbertError("superpose needs at least one term")
    space = terms[0][1].space
    amps = np.zeros(space.total_dimension, dtype=complex)
    for c, s in terms:
        _check_same_space(space, s.space)
        amps = amps + complex(c) * s.amplitudes
    out = StateVector(space, amps)
    return out.normalized() if normalize else out


def inner(bra: StateVector, ket: StateVector) -> complex:
    """<bra|ket>, antilinear in ``bra``."""
    _check_same_space(bra.space, ket.space)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def tensor(*states: StateVector) -> StateVector:
    regs: list[Register] = []
    amps = np.ones(1, dtype=complex)
    for s in states:
        regs.extend(s.space.registers)
        amps = np.kron(amps, s.amplitudes)
    return StateVector(CompositeSpace(tuple(regs)), amps)


def _full_matrix(op_matrix: np.ndarray, positions: list[int], dims: tuple[int, ...]) -> np.ndarray:
    rest = [i for i in range(len(dims)) if i not in positions]
    order = positions + rest
    rest_dim = int(np.prod([dims[i] for i in rest])) if rest else 1
    big = np.kron(op_matrix, np.eye(rest_dim))
    n = len(dims)
    shape = [dims[i] for i in order]
    t = big.reshape(shape + shape)
    # axis k of t (per half) holds register order[k]; undo that permutation
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + int(i) for i in inv])
    total = int(np.prod(dims))
    return t.reshape(total, total)


def embed(
    op: LinearOperator, target_registers: Sequence[str] | None, space: CompositeSpace
) -> LinearOperator:
    """Lift ``op`` onto ``space``, acting as identity on the other registers.

    ``target_registers`` defaults to the register names of ``op.space``.
    """
    targets = list(target_registers) if target_registers is not None else list(op.space.names)
    if len(set(targets)) != len(targets):
        raise HilbertError(f"duplicate target registers: {targets}")
    positions = [space.position(name) for name in targets]
    tdims = tuple(space.dims[p] for p in positions)
    if tdims != op.space.dims:
        raise SpaceMismatchError(
            f"operator dims {op.space.dims} do not match target registers {targets} with dims {tdims}"
        )
    matrix = _full_matrix(op.matrix, positions, space.dims)
    kind = op.kind if op.kind != "general" else None
    return LinearOperator(space, matrix, kind)


def controlled_embed(
    control_register: str,
    control_label: str,
    op: LinearOperator,
    space: CompositeSpace,
    target_registers: Sequence[str] | None = None,
) -> LinearOperator:
    """``op`` where ``control_register`` reads ``control_label``, identity elsewhere."""
    targets = list(target_registers) if target_registers is not None else list(op.space.names)
    if control_register in targets:
        raise HilbertError(f"control register {control_register!r} is also a target")
    creg = space.register(control_register)
    c = np.zeros((creg.dimension, creg.dimension))
    k = creg.index(control_label)
    c[k, k] = 1.0
    proj = embed(LinearOperator(CompositeSpace.of(creg), c, "projector"), [control_register], space)
    full = embed(op, targets, space)
    eye = np.eye(space.total_dimension)
    matrix = proj.matrix @ full.matrix + (eye - proj.matrix)
    kind = "unitary" if op.kind == "unitary" else None
    return LinearOperator(space, matrix, kind)


def fidelity_up_to_phase(a: StateVector, b: StateVector, atol: float = 1e-10) -> float:
    """|<a|b>| for normalized states; 1 iff they agree up to a global phase."""
    _check_same_space(a.space, b.space)
    for s in (a, b):
        if not s.is_normalized(atol):
            raise NormalizationError(f"state is not normalized (norm={s.norm:.6g})")
    return min(1.0, abs(inner(a, b)))
