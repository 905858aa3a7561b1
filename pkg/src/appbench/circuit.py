"""Circuit intermediate representation.

Bit order is little-endian throughout: qubit ``i`` (and classical bit ``i``)
carries weight ``2**i`` in every integer encoding of a basis state or outcome.
Bit strings shown to humans are written most-significant bit first.

Multi-qubit gate conventions:

* ``mcx``/``mcu``/``ucry``: ``qubits = (*controls, target)``.
* ``mcp``: diagonal phase ``exp(i*lam)`` on the all-ones state of its qubits
  (symmetric, so there is no distinguished target).
* ``unitary2q``: 4x4 matrix indexed by ``b0 + 2*b1`` where ``b0`` is the bit
  of ``qubits[0]``.
* ``can``: ``exp(i*(a*XX + b*YY + c*ZZ))`` with ``params = (a, b, c)``.
* ``ucry``: uniformly controlled ry; ``params[j]`` is the angle applied when the
  controls (little-endian, ``qubits[0]`` lowest) read ``j``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

ONE_QUBIT_FIXED = frozenset({"id", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "sx"})
ONE_QUBIT_PARAM = frozenset({"rx", "ry", "rz", "p"})
TWO_QUBIT = frozenset({"cx", "cz", "cp", "swap", "can", "unitary2q"})
MULTI_QUBIT = frozenset({"ccx", "mcx", "mcp", "mcu", "ucry"})
NON_UNITARY = frozenset({"measure", "reset", "barrier"})
GATE_NAMES = ONE_QUBIT_FIXED | ONE_QUBIT_PARAM | {"u"} | TWO_QUBIT | MULTI_QUBIT | NON_UNITARY
MATRIX_GATES = frozenset({"u", "mcu", "unitary2q"})

_ARITY = {
    **{g: 1 for g in ONE_QUBIT_FIXED | ONE_QUBIT_PARAM | {"u", "measure", "reset"}},
    **{g: 2 for g in TWO_QUBIT},
    "ccx": 3,
}
_NUM_PARAMS = {"rx": 1, "ry": 1, "rz": 1, "p": 1, "cp": 1, "mcp": 1, "can": 3}


class CircuitError(ValueError):
    pass


class MissingBinding(CircuitError):
    def __init__(self, symbol: str):
        super().__init__(f"no value bound for parameter {symbol!r}")
        self.symbol = symbol


class UnknownSymbol(UserWarning):
    pass


@dataclass(frozen=True)
class Param:
    """Symbolic angle ``scale * <name> + offset`` awaiting binding."""

    name: str
    scale: float = 1.0
    offset: float = 0.0

    def __mul__(self, k: float) -> "Param":
        return Param(self.name, self.scale * k, self.offset * k)

    __rmul__ = __mul__

    def __truediv__(self, k: float) -> "Param":
        return self * (1.0 / k)

    def __neg__(self) -> "Param":
        return self * -1.0

    def __add__(self, c: float) -> "Param":
        return Param(self.name, self.scale, self.offset + c)

    __radd__ = __add__

    def __sub__(self, c: float) -> "Param":
        return self + (-c)

    def bind(self, value: float) -> float:
        return self.scale * value + self.offset

    def __str__(self) -> str:
        s = self.name if self.scale == 1.0 else f"{self.scale!r}*{self.name}"
        return s if self.offset == 0.0 else f"{s}+{self.offset!r}"


Angle = Union[float, Param]


@dataclass(frozen=True, eq=False)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[Angle, ...] = ()
    clbit: int | None = None
    condition: tuple[int, int] | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def is_unitary(self) -> bool:
        return self.name not in NON_UNITARY

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(p, Param) for p in self.params)

    def symbols(self) -> set[str]:
        return {p.name for p in self.params if isinstance(p, Param)}

    def key(self) -> tuple:
        """Hashable identity used for equality (matrices compared bytewise)."""
        m = None if self.matrix is None else (self.matrix.shape, self.matrix.tobytes())
        return (self.name, self.qubits, self.params, self.clbit, self.condition, m)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Gate) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def with_condition(self, condition: tuple[int, int] | None) -> "Gate":
        return replace(self, condition=condition)


@dataclass(frozen=True)
class CircuitShape:
    width: int
    depth: int

    def __post_init__(self):
        if self.width < 1 or self.depth < 0:
            raise ValueError(f"invalid shape {self}")


class Circuit:
    """Ordered gate list over ``width`` qubits and ``clbits`` classical bits.

    Builder methods append in place and return ``self``; treat a circuit as a
    value once construction is finished (transformations return new circuits).
    """

    def __init__(self, width: int, clbits: int = 0, name: str = "circuit", tag: Mapping | None = None):
        if width < 1:
            raise CircuitError("circuit width must be >= 1")
        self.width = width
        self.clbits = clbits
        self.name = name
        self.tag = dict(tag or {})
        self._gates: list[Gate] = []

    # -- container protocol -------------------------------------------------
    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(self._gates)

    def __len__(self) -> int:
        return len(self._gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self._gates)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Circuit)
            and self.width == other.width
            and self.clbits == other.clbits
            and self._gates == other._gates
        )

    def __repr__(self) -> str:
        return f"Circuit({self.name!r}, width={self.width}, clbits={self.clbits}, gates={len(self)})"

    def copy(self, name: str | None = None) -> "Circuit":
        c = Circuit(self.width, self.clbits, name or self.name, self.tag)
        c._gates = list(self._gates)
        return c

    def empty_like(self) -> "Circuit":
        return Circuit(self.width, self.clbits, self.name, self.tag)

    def append(self, gate: Gate) -> "Circuit":
        self._gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        self._gates.extend(gates)
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        if other.width > self.width or other.clbits > self.clbits:
            raise CircuitError("composed circuit does not fit")
        return self.extend(other.gates)

    def inverse(self) -> "Circuit":
        """Adjoint of a purely unitary circuit."""
        out = self.empty_like()
        for g in reversed(self._gates):
            out.append(inverse_gate(g))
        return out

    # -- builders -----------------------------------------------------------
    def _g(self, name, qubits, params=(), **kw) -> "Circuit":
        return self.append(Gate(name, tuple(int(q) for q in qubits), tuple(params), **kw))

    def x(self, q, **kw): return self._g("x", (q,), **kw)
    def y(self, q, **kw): return self._g("y", (q,), **kw)
    def z(self, q, **kw): return self._g("z", (q,), **kw)
    def h(self, q, **kw): return self._g("h", (q,), **kw)
    def s(self, q, **kw): return self._g("s", (q,), **kw)
    def sdg(self, q, **kw): return self._g("sdg", (q,), **kw)
    def t(self, q, **kw): return self._g("t", (q,), **kw)
    def tdg(self, q, **kw): return self._g("tdg", (q,), **kw)
    def sx(self, q, **kw): return self._g("sx", (q,), **kw)
    def rx(self, theta, q, **kw): return self._g("rx", (q,), (theta,), **kw)
    def ry(self, theta, q, **kw): return self._g("ry", (q,), (theta,), **kw)
    def rz(self, theta, q, **kw): return self._g("rz", (q,), (theta,), **kw)
    def p(self, lam, q, **kw): return self._g("p", (q,), (lam,), **kw)
    def cx(self, c, t, **kw): return self._g("cx", (c, t), **kw)
    def cz(self, a, b, **kw): return self._g("cz", (a, b), **kw)
    def cp(self, lam, c, t, **kw): return self._g("cp", (c, t), (lam,), **kw)
    def swap(self, a, b, **kw): return self._g("swap", (a, b), **kw)
    def ccx(self, c0, c1, t, **kw): return self._g("ccx", (c0, c1, t), **kw)

    def mcx(self, controls: Sequence[int], target: int, **kw):
        return self._g("mcx", (*controls, target), **kw)

    def mcp(self, lam, qubits: Sequence[int], **kw):
        return self._g("mcp", qubits, (lam,), **kw)

    def can(self, a, b, c, q0, q1, **kw):
        return self._g("can", (q0, q1), (a, b, c), **kw)

    def ucry(self, angles: Sequence[float], controls: Sequence[int], target: int, **kw):
        return self._g("ucry", (*controls, target), tuple(float(a) for a in angles), **kw)

    def unitary(self, matrix, qubits: Sequence[int], **kw):
        m = np.array(matrix, dtype=complex)
        name = {2: "u", 4: "unitary2q"}.get(m.shape[0])
        if name is None or len(qubits) != (1 if name == "u" else 2):
            raise CircuitError("unitary() takes a 2x2 matrix on 1 qubit or 4x4 on 2 qubits")
        return self._g(name, qubits, matrix=m, **kw)

    def mcu(self, matrix, controls: Sequence[int], target: int, **kw):
        return self._g("mcu", (*controls, target), matrix=np.array(matrix, dtype=complex), **kw)

    def measure(self, q: int, c: int, **kw):
        return self._g("measure", (q,), clbit=int(c), **kw)

    def measure_all(self) -> "Circuit":
        """Measure qubit i into classical bit i, growing the register if needed."""
        self.clbits = max(self.clbits, self.width)
        for q in range(self.width):
            self.measure(q, q)
        return self

    def reset(self, q: int, **kw):
        return self._g("reset", (q,), **kw)

    def barrier(self, *qubits: int):
        return self._g("barrier", qubits or tuple(range(self.width)))

    # -- queries ------------------------------------------------------------
    def symbols(self) -> set[str]:
        out: set[str] = set()
        for g in self._gates:
            out |= g.symbols()
        return out

    @property
    def is_bound(self) -> bool:
        return not any(g.is_symbolic for g in self._gates)

    def count_ops(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self._gates:
            counts[g.name] = counts.get(g.name, 0) + 1
        return dict(sorted(counts.items()))

    def shape(self) -> CircuitShape:
        return CircuitShape(self.width, depth(self))


def inverse_gate(g: Gate) -> Gate:
    if not g.is_unitary:
        raise CircuitError(f"cannot invert non-unitary gate {g.name}")
    n = g.name
    if n in ("id", "x", "y", "z", "h", "cx", "cz", "swap", "ccx", "mcx"):
        return g
    if n in ("s", "t"):
        return replace(g, name=n + "dg")
    if n in ("sdg", "tdg"):
        return replace(g, name=n[:-2])
    if n == "sx":
        return replace(g, name="u", matrix=_SX.conj().T)
    if n in ("rx", "ry", "rz", "p", "cp", "mcp", "can", "ucry"):
        return replace(g, params=tuple(-p for p in g.params))
    if n in MATRIX_GATES:
        return replace(g, matrix=g.matrix.conj().T)
    raise CircuitError(f"no inverse rule for {n}")


_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------
def depth(circuit: Circuit) -> int:
    """Layer count under as-soon-as-possible scheduling.

    Classical bits are wires too: a measurement occupies its clbit and a
    conditioned gate waits for the clbit it reads.  Barriers align every wire
    to the current frontier but add no layer.
    """
    qlev = [0] * circuit.width
    clev = [0] * circuit.clbits
    for g in circuit:
        if g.name == "barrier":
            top = max(qlev + clev, default=0)
            qlev = [top] * circuit.width
            clev = [top] * circuit.clbits
            continue
        wires_c = []
        if g.clbit is not None:
            wires_c.append(g.clbit)
        if g.condition is not None:
            wires_c.append(g.condition[0])
        level = 1 + max([qlev[q] for q in g.qubits] + [clev[c] for c in wires_c])
        for q in g.qubits:
            qlev[q] = level
        for c in wires_c:
            clev[c] = level
    return max(qlev + clev, default=0)


# ---------------------------------------------------------------------------
# parameter binding
# ---------------------------------------------------------------------------
def bind_params(circuit: Circuit, binding: Mapping[str, float], strict: bool = False) -> Circuit:
    """Substitute numeric values for symbolic angles.

    Symbols in ``binding`` that the circuit does not use trigger an
    ``UnknownSymbol`` warning (an error when ``strict``), so one table can
    serve a whole circuit family.
    """
    used = circuit.symbols()
    extra = sorted(set(binding) - used)
    if extra:
        msg = f"binding names symbols absent from circuit: {extra}"
        if strict:
            raise CircuitError(msg)
        warnings.warn(msg, UnknownSymbol, stacklevel=2)
    missing = sorted(used - set(binding))
    if missing:
        raise MissingBinding(missing[0])
    out = circuit.empty_like()
    for g in circuit:
        if g.is_symbolic:
            g = replace(g, params=tuple(
                p.bind(float(binding[p.name])) if isinstance(p, Param) else p for p in g.params
            ))
        out.append(g)
    return out


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------
def validate(circuit: Circuit) -> list[str]:
    """Return every invariant violation as ``"<message> at gate <i>"``; empty if valid."""
    problems = []
    n = circuit.width
    for i, g in enumerate(circuit):
        where = f"at gate {i}"
        if g.name not in GATE_NAMES:
            problems.append(f"unknown gate kind {g.name!r} {where}")
            continue
        if len(set(g.qubits)) != len(g.qubits):
            problems.append(f"duplicate qubit {where}")
        if any(q < 0 or q >= n for q in g.qubits):
            problems.append(f"qubit index out of range {where}")
        arity = _ARITY.get(g.name)
        if arity is not None and len(g.qubits) != arity:
            problems.append(f"{g.name} expects {arity} qubit(s), got {len(g.qubits)} {where}")
        if g.name in MULTI_QUBIT and g.name != "ccx" and len(g.qubits) < (1 if g.name == "mcp" else 2):
            problems.append(f"{g.name} needs at least one control {where}")
        if g.name == "measure":
            if g.clbit is None:
                problems.append(f"measure without classical bit {where}")
            elif not 0 <= g.clbit < circuit.clbits:
                problems.append(f"classical bit index out of range {where}")
        elif g.clbit is not None:
            problems.append(f"{g.name} carries a classical bit {where}")
        if g.condition is not None:
            c, v = g.condition
            if not 0 <= c < circuit.clbits:
                problems.append(f"condition bit out of range {where}")
            if v not in (0, 1):
                problems.append(f"condition value must be 0 or 1 {where}")
        want = _NUM_PARAMS.get(g.name)
        if want is not None and len(g.params) != want:
            problems.append(f"{g.name} expects {want} parameter(s) {where}")
        if g.name == "ucry" and len(g.params) != 2 ** (len(g.qubits) - 1):
            problems.append(f"ucry expects {2 ** (len(g.qubits) - 1)} angles {where}")
        if g.name in MATRIX_GATES:
            dim = 4 if g.name == "unitary2q" else 2
            m = g.matrix
            if m is None or m.shape != (dim, dim):
                problems.append(f"{g.name} needs a {dim}x{dim} matrix {where}")
            elif np.max(np.abs(m.conj().T @ m - np.eye(dim))) > 1e-10:
                problems.append(f"non-unitary matrix {where}")
    return problems


def check(circuit: Circuit) -> Circuit:
    problems = validate(circuit)
    if problems:
        raise CircuitError("; ".join(problems))
    return circuit


# ---------------------------------------------------------------------------
# text dump
# ---------------------------------------------------------------------------
# Grammar, one item per line:
#   circuit <name> qubits=<w> clbits=<c>
#   <gate> <q> [<q> ...] [@<p>,<p>,...] [%<re>:<im>,...] [><clbit>] [?<c>=<v>]
# Angles use Python float repr so dumps round-trip exactly; symbolic angles are
# written as <name>, <scale>*<name> or <scale>*<name>+<offset>.  Matrices are
# row-major.  Lines starting with '#' are comments.

def _fmt_angle(p: Angle) -> str:
    return str(p) if isinstance(p, Param) else repr(float(p))


def _parse_angle(tok: str) -> Angle:
    try:
        return float(tok)
    except ValueError:
        pass
    offset = 0.0
    if "+" in tok:
        tok, off = tok.rsplit("+", 1)
        offset = float(off)
    scale, name = (tok.split("*", 1) if "*" in tok else ("1.0", tok))
    return Param(name, float(scale), offset)


def dumps(circuit: Circuit) -> str:
    lines = [f"circuit {circuit.name} qubits={circuit.width} clbits={circuit.clbits}"]
    for g in circuit:
        parts = [g.name, *map(str, g.qubits)]
        if g.params:
            parts.append("@" + ",".join(_fmt_angle(p) for p in g.params))
        if g.matrix is not None:
            parts.append("%" + ",".join(f"{float(z.real)!r}:{float(z.imag)!r}" for z in g.matrix.ravel()))
        if g.clbit is not None:
            parts.append(f">{g.clbit}")
        if g.condition is not None:
            parts.append(f"?{g.condition[0]}={g.condition[1]}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    circuit = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if toks[0] == "circuit":
            kv = dict(t.split("=", 1) for t in toks[2:])
            circuit = Circuit(int(kv["qubits"]), int(kv.get("clbits", 0)), toks[1])
            continue
        if circuit is None:
            raise CircuitError("missing 'circuit' header line")
        name, qubits, params, matrix, clbit, cond = toks[0], [], (), None, None, None
        for t in toks[1:]:
            if t[0] == "@":
                params = tuple(_parse_angle(s) for s in t[1:].split(","))
            elif t[0] == "%":
                vals = [complex(float(a), float(b)) for a, b in (s.split(":") for s in t[1:].split(","))]
                dim = math.isqrt(len(vals))
                matrix = np.array(vals, dtype=complex).reshape(dim, dim)
            elif t[0] == ">":
                clbit = int(t[1:])
            elif t[0] == "?":
                c, v = t[1:].split("=")
                cond = (int(c), int(v))
            else:
                qubits.append(int(t))
        circuit.append(Gate(name, tuple(qubits), params, clbit, cond, matrix))
    if circuit is None:
        raise CircuitError("empty circuit text")
    return circuit
