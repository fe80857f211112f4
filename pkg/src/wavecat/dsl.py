"""A line-oriented circuit description language.

Example::

    # analyzer side of the separation experiment
    register arm L R
    register mode 1 2 3 4
    bs_sym 2 4 on arm=R
    sigma1234 on arm=R
    bs3
    wave_router pi/3 on arm=R

Each non-blank line is a register declaration, an element, or one term of
the pre/post selection state (``pre <coefficient> <label per register>``).
``#`` starts a comment. Numbers are decimal literals or ``pi``/``pi/N``
with an optional sign; angles are radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import optics
from .hilbert import (
    CompositeSpace,
    HilbertError,
    LinearOperator,
    Register,
    StateVector,
    basis_state,
    controlled_embed,
    embed,
    identity,
    superpose,
)

ERROR_KINDS = ("unknown-element", "unknown-label", "arity-mismatch", "bad-number", "syntax")


class ParseError(ValueError):
    def __init__(self, kind: str, line: int, column: int, message: str):
        assert kind in ERROR_KINDS
        super().__init__(f"{line}:{column}: {kind}: {message}")
        self.kind = kind
        self.line = line
        self.column = column
        self.message = message


class CompileError(HilbertError):
    pass


@dataclass(frozen=True)
class Signature:
    ports: int
    params: int


# canonical keyword -> (signature, optics element name)
CATALOG: dict[str, tuple[Signature, str]] = {
    "pbs": (Signature(3, 0), "PBS"),
    "hwp": (Signature(1, 0), "HWP"),
    "bs_sym": (Signature(2, 0), "BS_sym"),
    "bs3": (Signature(0, 0), "BS3"),
    "phase": (Signature(1, 1), "PhaseShifter"),
    "sigma1234": (Signature(0, 0), "Sigma1234"),
    "wave_router": (Signature(0, 1), "WaveRouter"),
}
_ALIASES = {name.lower(): kw for kw, (_, name) in CATALOG.items()}
_ALIASES.update({kw: kw for kw in CATALOG})

KEYWORDS = ("register", "pre", "post")

_NUMBER = re.compile(r"[+-]?(?:pi(?:/(\d+))?|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"[^\s]+")


@dataclass(frozen=True)
class RegisterDecl:
    name: str
    labels: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ElementSpec:
    name: str
    ports: tuple[str, ...] = ()
    params: tuple[float, ...] = ()
    control: tuple[str, str] | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SelectionTerm:
    which: str
    coefficient: float
    labels: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CircuitSpec:
    registers: tuple[RegisterDecl, ...] = ()
    elements: tuple[ElementSpec, ...] = ()
    selections: tuple[SelectionTerm, ...] = ()

    @property
    def space(self) -> CompositeSpace:
        if not self.registers:
            raise CompileError("circuit declares no registers")
        return CompositeSpace(tuple(Register(r.name, r.labels) for r in self.registers))

    def selection_state(self, which: str) -> StateVector | None:
        """Normalized pre or post state from the selection terms, if any."""
        terms = [t for t in self.selections if t.which == which]
        if not terms:
            return None
        space = self.space
        return superpose([(t.coefficient, basis_state(space, t.labels)) for t in terms], normalize=True)


def parse_number(text: str) -> float:
    """Parse a numeric literal; raises ``ValueError`` on anything else."""
    m = _NUMBER.fullmatch(text)
    if not m:
        raise ValueError(text)
    body = text.lstrip("+-")
    sign = -1.0 if text.startswith("-") else 1.0
    if body.startswith("pi"):
        if m.group(1) is None:
            return sign * math.pi
        div = int(m.group(1))
        if div == 0:
            raise ValueError(text)
        return sign * math.pi / div
    value = float(body)
    if not math.isfinite(value):
        raise ValueError(text)
    return sign * value


def format_number(value: float) -> str:
    return format(float(value), ".17g")


class _Parser:
    def __init__(self):
        self.registers: list[RegisterDecl] = []
        self.elements: list[ElementSpec] = []
        self.selections: list[SelectionTerm] = []

    def _label_known(self, label: str) -> bool:
        return any(label in r.labels for r in self.registers)

    def _register(self, name: str):
        for r in self.registers:
            if r.name == name:
                return r
        return None

    def line(self, lineno: int, text: str):
        text = text.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]
        if not toks:
            return
        head, col = toks[0]
        kw = head.lower()
        if kw == "register":
            self._register_decl(lineno, toks)
        elif kw in ("pre", "post"):
            self._selection(lineno, kw, toks)
        elif kw in _ALIASES:
            self._element(lineno, _ALIASES[kw], toks)
        else:
            raise ParseError("unknown-element", lineno, col, f"unknown element {head!r}")

    def _register_decl(self, lineno, toks):
        if len(toks) < 3:
            col = toks[-1][1]
            raise ParseError("arity-mismatch", lineno, col, "register needs a name and at least one label")
        name, col = toks[1]
        if not _IDENT.fullmatch(name) or name.lower() in KEYWORDS or name.lower() == "on":
            raise ParseError("syntax", lineno, col, f"bad register name {name!r}")
        if self._register(name) is not None:
            raise ParseError("syntax", lineno, col, f"register {name!r} declared twice")
        if self.selections:
            raise ParseError("syntax", lineno, toks[0][1], "registers must be declared before pre/post terms")
        labels = []
        for lab, lcol in toks[2:]:
            if "=" in lab or lab.lower() == "on" or lab in labels:
                raise ParseError("syntax", lineno, lcol, f"bad or duplicate label {lab!r}")
            labels.append(lab)
        self.registers.append(RegisterDecl(name, tuple(labels), lineno))

    def _selection(self, lineno, which, toks):
        n = len(self.registers)
        if n == 0:
            raise ParseError("syntax", lineno, toks[0][1], f"{which} term before any register declaration")
        if len(toks) != 2 + n:
            col = toks[min(len(toks), 2 + n) - 1][1]
            raise ParseError("arity-mismatch", lineno, col, f"{which} needs a coefficient and {n} labels")
        coef = self._number(lineno, *toks[1])
        labels = []
        for reg, (lab, col) in zip(self.registers, toks[2:]):
            if lab not in reg.labels:
                raise ParseError("unknown-label", lineno, col, f"{lab!r} is not a label of register {reg.name!r}")
            labels.append(lab)
        self.selections.append(SelectionTerm(which, coef, tuple(labels), lineno))

    def _number(self, lineno, text, col) -> float:
        try:
            return parse_number(text)
        except (ValueError, OverflowError):
            raise ParseError("bad-number", lineno, col, f"not a number: {text!r}") from None

    def _element(self, lineno, kw, toks):
        sig, _ = CATALOG[kw]
        args = toks[1:]
        control = None
        on_at = next((i for i, (t, _) in enumerate(args) if t.lower() == "on"), None)
        if on_at is not None:
            clause = args[on_at + 1 :]
            args = args[:on_at]
            control = self._control(lineno, toks[1 + on_at][1], clause)
        if len(args) != sig.ports + sig.params:
            col = args[-1][1] if args else toks[0][1]
            raise ParseError(
                "arity-mismatch",
                lineno,
                col,
                f"{kw} takes {sig.ports} port(s) and {sig.params} parameter(s), got {len(args)} argument(s)",
            )
        ports = []
        for lab, col in args[: sig.ports]:
            if not self._label_known(lab):
                raise ParseError("unknown-label", lineno, col, f"label {lab!r} is not declared in any register")
            ports.append(lab)
        params = tuple(self._number(lineno, t, c) for t, c in args[sig.ports :])
        self.elements.append(ElementSpec(kw, tuple(ports), params, control, lineno))

    def _control(self, lineno, on_col, clause) -> tuple[str, str]:
        if not clause:
            raise ParseError("syntax", lineno, on_col, "expected <register>=<label> after 'on'")
        text = "".join(t for t, _ in clause)
        col = clause[0][1]
        reg_name, eq, label = text.partition("=")
        if not eq or not reg_name or not label:
            raise ParseError("syntax", lineno, col, f"expected <register>=<label>, got {text!r}")
        reg = self._register(reg_name)
        if reg is None:
            raise ParseError("unknown-label", lineno, col, f"unknown register {reg_name!r}")
        if label not in reg.labels:
            raise ParseError("unknown-label", lineno, col, f"{label!r} is not a label of register {reg_name!r}")
        return (reg_name, label)


def parse(text: str | bytes) -> CircuitSpec:
    """Parse circuit source text; raises :class:`ParseError` on the first problem."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("syntax", 1, 1, f"input is not valid UTF-8 ({exc.reason})") from None
    p = _Parser()
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        p.line(lineno, raw)
    return CircuitSpec(tuple(p.registers), tuple(p.elements), tuple(p.selections))


def load(path: str | Path) -> CircuitSpec:
    return parse(Path(path).read_bytes())


def bundled_path(name: str) -> Path:
    if not name.endswith(".circuit"):
        name += ".circuit"
    return Path(str(resources.files("wavecat") / "circuits" / name))


def load_bundled(name: str) -> CircuitSpec:
    return load(bundled_path(name))


def roundtrip(spec: CircuitSpec) -> str:
    """Canonical text: registers, then elements, then selection terms, LF-terminated."""
    lines = [" ".join(("register", r.name) + r.labels) for r in spec.registers]
    for el in spec.elements:
        parts = [el.name, *el.ports, *(format_number(v) for v in el.params)]
        if el.control is not None:
            parts += ["on", f"{el.control[0]}={el.control[1]}"]
        lines.append(" ".join(parts))
    for t in spec.selections:
        lines.append(" ".join([t.which, format_number(t.coefficient), *t.labels]))
    return "".join(line + "\n" for line in lines)


# -- compilation -------------------------------------------------------------


def _find(space: CompositeSpace, pred, what: str, exclude=()) -> Register:
    for r in space.registers:
        if r.name not in exclude and pred(r):
            return r
    raise CompileError(f"no declared register fits {what}")


def _element_operator(el: ElementSpec, space: CompositeSpace) -> tuple[LinearOperator, list[str]]:
    ports = el.ports

    def holds_ports(r):
        return all(p in r.basis_labels for p in ports)

    if el.name in ("bs_sym", "phase"):
        reg = _find(space, holds_ports, f"ports {ports}")
        if el.name == "bs_sym":
            e = optics.bs_sym(ports, reg)
        else:
            e = optics.phase_shifter(ports[0], el.params[0], reg)
        return e.unitary, [reg.name]
    if el.name in ("pbs", "hwp"):
        pol = _find(space, lambda r: r.basis_labels == optics.POL.basis_labels, "polarization (labels H V)")
        path = _find(space, holds_ports, f"ports {ports}", exclude=(pol.name,))
        try:
            e = optics.pbs(ports, path) if el.name == "pbs" else optics.hwp(ports[0], path)
        except HilbertError as exc:
            raise CompileError(str(exc)) from None
        return e.unitary, [pol.name, path.name]
    if el.name == "bs3":
        reg = _find(space, lambda r: r.basis_labels == optics.ARM.basis_labels, "arm (labels L R)")
        return optics.bs3().unitary, [reg.name]
    reg = _find(space, lambda r: r.basis_labels == optics.MODE.basis_labels, "modes (labels 1 2 3 4)")
    if el.name == "sigma1234":
        return optics.sigma1234().unitary, [reg.name]
    return optics.wave_router(el.params[0]).unitary, [reg.name]


def compile_circuit(spec: CircuitSpec) -> list[LinearOperator]:
    """One operator on the full declared space per element, in file order."""
    if not spec.elements:
        return []
    space = spec.space
    ops = []
    for el in spec.elements:
        try:
            op, targets = _element_operator(el, space)
            if el.control is None:
                ops.append(embed(op, targets, space))
            else:
                ops.append(controlled_embed(el.control[0], el.control[1], op, space, targets))
        except HilbertError as exc:
            raise CompileError(f"line {el.line}: {el.name}: {exc}") from None
    return ops


def pipeline_unitary(ops: list[LinearOperator], space: CompositeSpace) -> LinearOperator:
    u = identity(space)
    for op in ops:
        u = op @ u
    return u


def run(spec: CircuitSpec, state: StateVector | None = None) -> StateVector:
    """Apply the compiled circuit to ``state`` (default: the declared pre state)."""
    if state is None:
        state = spec.selection_state("pre")
        if state is None:
            raise CompileError("circuit has no pre state and none was given")
    for op in compile_circuit(spec):
        state = op.apply(state)
    return state


def amplitudes_table(state: StateVector) -> list[tuple[str, complex]]:
    return [(" ".join(lab), complex(state.amplitudes[i])) for i, lab in enumerate(state.space.basis())]


__all__ = [
    "ParseError",
    "CompileError",
    "CircuitSpec",
    "RegisterDecl",
    "ElementSpec",
    "SelectionTerm",
    "CATALOG",
    "parse",
    "parse_number",
    "load",
    "load_bundled",
    "bundled_path",
    "roundtrip",
    "compile_circuit",
    "pipeline_unitary",
    "run",
    "amplitudes_table",
]
