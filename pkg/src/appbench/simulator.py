"""State-vector simulation: exact ideal distributions and noisy trajectory sampling.

States are stored as a batch of rows, shape ``(rows, 2**n)``, so that many
trajectories (or measurement branches) advance through a gate with one numpy
call.  Noise is a depolarizing channel after every one- and two-qubit unitary,
unravelled into random Pauli insertions.

Two sampling strategies share the kernels:

* circuits whose measurements are all terminal pre-sample every error event,
  group shots with identical error histories and start each group from a copy
  of the error-free row at the point of its first error;
* circuits with mid-circuit measurement, reset or classical conditions keep one
  row per shot together with its classical register.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .circuit import Circuit, CircuitError, Gate
from .matrices import gate_matrix

DEFAULT_WIDTH_LIMIT = 24
PRUNE = 1e-12
# complex amplitudes held in one batch (~64 MiB)
BATCH_BUDGET = 1 << 22


class WidthLimitExceeded(CircuitError):
    def __init__(self, width: int, limit: int):
        super().__init__(f"circuit width {width} exceeds the simulator limit {limit}")
        self.width = width
        self.limit = limit


class UnboundParameter(CircuitError):
    def __init__(self, symbols: Iterable[str]):
        names = sorted(symbols)
        super().__init__(f"circuit has unbound parameters: {', '.join(names)}")
        self.symbols = names


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def is_zero(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0

    @classmethod
    def parse(cls, text: str | None) -> "NoiseModel | None":
        """Parse ``"p1,p2"``; ``"none"`` or empty gives ``None``."""
        if text is None or text.strip().lower() in ("", "none"):
            return None
        a, b = text.split(",")
        return cls(float(a), float(b))


@dataclass
class ExecTiming:
    t_create: float = 0.0
    t_compile: float = 0.0
    t_quantum: float = 0.0
    shots: int = 0


class Distribution:
    """Outcome distribution over ``num_bits`` classical bits.

    Outcomes are integers (bit ``i`` has weight ``2**i``).  An empirical
    distribution stores integer counts and its shot total; :meth:`prob`
    always returns normalized probabilities.
    """

    def __init__(self, num_bits: int, probs: Mapping[int, float] | None = None,
                 counts: Mapping[int, int] | None = None):
        if (probs is None) == (counts is None):
            raise ValueError("give exactly one of probs or counts")
        self.num_bits = int(num_bits)
        if counts is not None:
            self.counts = {int(k): int(v) for k, v in sorted(counts.items()) if v}
            self.shots = sum(self.counts.values())
            self.probs = {k: v / self.shots for k, v in self.counts.items()}
        else:
            self.counts = None
            self.shots = None
            self.probs = {int(k): float(v) for k, v in sorted(probs.items()) if v > 0}

    @classmethod
    def from_array(cls, num_bits: int, arr: np.ndarray, cutoff: float = 0.0) -> "Distribution":
        nz = np.flatnonzero(arr > cutoff)
        return cls(num_bits, probs={int(i): float(arr[i]) for i in nz})

    @classmethod
    def delta(cls, num_bits: int, outcome: int) -> "Distribution":
        return cls(num_bits, probs={int(outcome): 1.0})

    @classmethod
    def uniform(cls, num_bits: int) -> "Distribution":
        return cls(num_bits, probs={i: 2.0 ** -num_bits for i in range(2 ** num_bits)})

    @property
    def is_empirical(self) -> bool:
        return self.counts is not None

    def prob(self, outcome: int) -> float:
        return self.probs.get(int(outcome), 0.0)

    def to_array(self) -> np.ndarray:
        out = np.zeros(2 ** self.num_bits)
        for k, v in self.probs.items():
            out[k] = v
        return out

    def bitstring(self, outcome: int) -> str:
        return format(outcome, f"0{self.num_bits}b") if self.num_bits else ""

    def as_strings(self) -> dict[str, float]:
        src = self.counts if self.counts is not None else self.probs
        return {self.bitstring(k): v for k, v in src.items()}

    def total_variation(self, other: "Distribution") -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.prob(k) - other.prob(k)) for k in keys)

    def __repr__(self) -> str:
        kind = f"shots={self.shots}" if self.is_empirical else "ideal"
        return f"Distribution(bits={self.num_bits}, {kind}, support={len(self.probs)})"


# ---------------------------------------------------------------------------
# kernels: all act in place on a C-contiguous complex array of shape (B, 2**n)
# ---------------------------------------------------------------------------
def _split(a: np.ndarray, n: int, q: int):
    v = a.reshape(a.shape[0], 1 << (n - q - 1), 2, 1 << q)
    return v[:, :, 0, :], v[:, :, 1, :]


def apply_1q(a: np.ndarray, n: int, q: int, u: np.ndarray) -> None:
    a0, a1 = _split(a, n, q)
    if u[0, 1] == 0 and u[1, 0] == 0:
        if u[0, 0] != 1:
            a0 *= u[0, 0]
        if u[1, 1] != 1:
            a1 *= u[1, 1]
        return
    t = a0.copy()
    a0 *= u[0, 0]
    a0 += u[0, 1] * a1
    a1 *= u[1, 1]
    a1 += u[1, 0] * t


def apply_cx(a: np.ndarray, n: int, c: int, t: int) -> None:
    hi, lo = max(c, t), min(c, t)
    v = a.reshape(a.shape[0], 1 << (n - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    if c == hi:
        x0, x1 = v[:, :, 1, :, 0, :], v[:, :, 1, :, 1, :]
    else:
        x0, x1 = v[:, :, 0, :, 1, :], v[:, :, 1, :, 1, :]
    tmp = x0.copy()
    x0[...] = x1
    x1[...] = tmp


def apply_pauli(a: np.ndarray, n: int, q: int, code: int) -> None:
    """Apply X (1), Y (2) or Z (3) on qubit ``q``."""
    a0, a1 = _split(a, n, q)
    if code == 3:
        a1 *= -1
        return
    tmp = a0.copy()
    if code == 1:
        a0[...] = a1
        a1[...] = tmp
    else:
        np.multiply(a1, -1j, out=a0)
        np.multiply(tmp, 1j, out=a1)


class _IndexCache:
    def __init__(self, n: int):
        self.n = n
        self.basis = np.arange(1 << n, dtype=np.int64)
        self._c: dict = {}

    def controlled(self, controls: tuple[int, ...], target: int):
        key = ("c", controls, target)
        if key not in self._c:
            mask = 0
            for c in controls:
                mask |= 1 << c
            sel = self.basis[((self.basis & mask) == mask) & ((self.basis >> target) & 1 == 0)]
            self._c[key] = (sel, sel | (1 << target))
        return self._c[key]

    def ones(self, qubits: tuple[int, ...]):
        key = ("o", qubits)
        if key not in self._c:
            mask = 0
            for q in qubits:
                mask |= 1 << q
            self._c[key] = self.basis[(self.basis & mask) == mask]
        return self._c[key]


def apply_controlled(a: np.ndarray, idx, u: np.ndarray) -> None:
    i0, i1 = idx
    a0 = a[:, i0]
    a1 = a[:, i1]
    a[:, i0] = u[0, 0] * a0 + u[0, 1] * a1
    a[:, i1] = u[1, 0] * a0 + u[1, 1] * a1


def apply_dense(a: np.ndarray, n: int, qubits: tuple[int, ...], m: np.ndarray) -> None:
    k = len(qubits)
    b = a.shape[0]
    t = a.reshape((b,) + (2,) * n)
    # tensor axis of qubit q is 1 + (n-1-q); matrix axes run MSB first
    axes = [1 + n - 1 - q for q in reversed(qubits)]
    mt = m.reshape((2,) * (2 * k))
    out = np.tensordot(mt, t, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    a[...] = out.reshape(b, -1)


# ---------------------------------------------------------------------------
# compiled programs
# ---------------------------------------------------------------------------
@dataclass
class _Op:
    kind: str  # "u1", "cx", "ctrl", "phase", "dense", "measure", "reset", "barrier"
    qubits: tuple[int, ...]
    data: object = None
    clbit: int | None = None
    condition: tuple[int, int] | None = None
    noise_arity: int = 0
    final: bool = False


def _compile_gate(g: Gate, cache: _IndexCache) -> _Op:
    n = g.name
    q = g.qubits
    arity = len(q) if g.is_unitary and len(q) <= 2 else 0
    if n == "barrier":
        return _Op("barrier", q)
    if n == "measure":
        return _Op("measure", q, clbit=g.clbit, condition=g.condition)
    if n == "reset":
        return _Op("reset", q, condition=g.condition)
    if n == "cx":
        return _Op("cx", q, condition=g.condition, noise_arity=2)
    if len(q) == 1:
        return _Op("u1", q, gate_matrix(g), condition=g.condition, noise_arity=1)
    if n in ("ccx", "mcx"):
        return _Op("ctrl", q, (cache.controlled(q[:-1], q[-1]), np.array([[0, 1], [1, 0]], dtype=complex)),
                   condition=g.condition, noise_arity=arity)
    if n == "mcu":
        return _Op("ctrl", q, (cache.controlled(q[:-1], q[-1]), g.matrix), condition=g.condition, noise_arity=arity)
    if n in ("cz", "cp", "mcp"):
        lam = math.pi if n == "cz" else float(g.params[0])
        return _Op("phase", q, (cache.ones(q), np.exp(1j * lam)), condition=g.condition, noise_arity=arity)
    return _Op("dense", q, gate_matrix(g), condition=g.condition, noise_arity=arity)


def apply_2q(a: np.ndarray, n: int, q0: int, q1: int, m: np.ndarray) -> None:
    """Dense 4x4 ``m`` (index ``b0 + 2*b1``) on qubits ``q0``, ``q1``."""
    b = a.shape[0]
    hi, lo = max(q0, q1), min(q0, q1)
    v = a.reshape(b, 1 << (n - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    # gather to (b_hi, b_lo, rest) then to matrix index order (b1, b0)
    t = v.transpose(2, 4, 0, 1, 3, 5)
    if q1 == lo:
        t = t.transpose(1, 0, 2, 3, 4, 5)
    out = (m @ t.reshape(4, -1)).reshape(t.shape)
    t[...] = out


def _local(m: np.ndarray, positions: tuple[int, ...], k: int) -> np.ndarray:
    """Lift a gate matrix onto a k-qubit block (k <= 2) given its qubits' block positions."""
    if k == 1:
        return m
    if len(positions) == 2:
        if positions == (0, 1):
            return m
        return m.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)
    eye = np.eye(2, dtype=complex)
    return np.kron(eye, m) if positions == (0,) else np.kron(m, eye)


_PAULI = (np.eye(2, dtype=complex), np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]], dtype=complex))


@dataclass
class _Block:
    qubits: tuple[int, ...]
    start: int
    stop: int
    matrix: np.ndarray
    suffix: list  # suffix[i]: product of the block's gates after gate start+i
    positions: list
    _corr: dict = field(default_factory=dict)

    def correction(self, g: int, code: int) -> np.ndarray:
        """Matrix that turns the fused result into one with a Pauli after gate ``g``."""
        key = (g, code)
        if key not in self._corr:
            k = len(self.qubits)
            p = np.ones((1, 1), dtype=complex)
            for _ in self.positions[g - self.start]:
                p = np.kron(_PAULI[code & 3], p)
                code >>= 2
            v = self.suffix[g - self.start]
            self._corr[key] = v @ _local(p, self.positions[g - self.start], k) @ v.conj().T
        return self._corr[key]


def _fuse(prog: "Program") -> list[_Block]:
    """Group consecutive unconditioned unitaries acting on at most two qubits."""
    blocks: list[_Block] = []
    i = 0
    ops = prog.ops
    while i < len(ops):
        op = ops[i]
        if op.kind in ("barrier", "measure") or op.condition is not None or len(op.qubits) > 2 or op.kind == "reset":
            i += 1
            continue
        qs = list(op.qubits)
        j = i + 1
        while j < len(ops):
            nxt = ops[j]
            if nxt.kind in ("barrier", "measure", "reset") or nxt.condition is not None:
                break
            union = qs + [q for q in nxt.qubits if q not in qs]
            if len(union) > 2:
                break
            qs = union
            j += 1
        k = len(qs)
        mats, positions = [], []
        for g in range(i, j):
            pos = tuple(qs.index(q) for q in ops[g].qubits)
            positions.append(pos)
            mats.append(_local(gate_matrix(prog.gates[g]), pos, k))
        suffix = [None] * (j - i)
        acc = np.eye(2 ** k, dtype=complex)
        for g in range(j - 1, i - 1, -1):
            suffix[g - i] = acc
            acc = acc @ mats[g - i]
        blocks.append(_Block(tuple(qs), i, j, acc, suffix, positions))
        i = j
    return blocks


def _apply_block(a: np.ndarray, n: int, qubits: tuple[int, ...], m: np.ndarray) -> None:
    if len(qubits) == 1:
        apply_1q(a, n, qubits[0], m)
    else:
        apply_2q(a, n, qubits[0], qubits[1], m)


def _apply_unitary(a: np.ndarray, n: int, op: _Op) -> None:
    k = op.kind
    if k == "u1":
        apply_1q(a, n, op.qubits[0], op.data)
    elif k == "cx":
        apply_cx(a, n, op.qubits[0], op.qubits[1])
    elif k == "ctrl":
        apply_controlled(a, op.data[0], op.data[1])
    elif k == "phase":
        idx, ph = op.data
        a[:, idx] *= ph
    elif k == "dense":
        apply_dense(a, n, op.qubits, op.data)


class Program:
    """A circuit lowered to kernel calls, with terminal measurements identified."""

    def __init__(self, circuit: Circuit, width_limit: int = DEFAULT_WIDTH_LIMIT):
        if circuit.width > width_limit:
            raise WidthLimitExceeded(circuit.width, width_limit)
        if not circuit.is_bound:
            raise UnboundParameter(circuit.symbols())
        self.n = circuit.width
        self.clbits = circuit.clbits
        cache = _IndexCache(self.n)
        self.gates = list(circuit)
        self.ops = [_compile_gate(g, cache) for g in self.gates]
        self._blocks = None
        self._mark_final()
        self.simple = all(
            op.kind not in ("reset",) and op.condition is None and (op.kind != "measure" or op.final)
            for op in self.ops
        )
        self.basis = cache.basis

    def _mark_final(self) -> None:
        touched_q: set[int] = set()
        read_c: set[int] = set()
        written_c: set[int] = set()
        for op in reversed(self.ops):
            if op.kind == "measure":
                q, c = op.qubits[0], op.clbit
                op.final = (q not in touched_q and c not in read_c and c not in written_c
                            and op.condition is None)
                written_c.add(c)
            if op.condition is not None:
                read_c.add(op.condition[0])
            if op.kind != "barrier":
                touched_q.update(op.qubits)

    @property
    def blocks(self) -> list["_Block"]:
        if self._blocks is None:
            self._blocks = _fuse(self)
        return self._blocks

    def final_map(self) -> tuple[np.ndarray, dict[int, int]]:
        """Map from basis index to classical value written by terminal measurements."""
        out = np.zeros(1 << self.n, dtype=np.int64)
        assign: dict[int, int] = {}
        for op in self.ops:
            if op.kind == "measure" and op.final:
                assign[op.clbit] = op.qubits[0]
        for c, q in assign.items():
            out |= ((self.basis >> q) & 1) << c
        return out, assign


def _marginal(probs: np.ndarray, cmap: np.ndarray, clbits: int) -> np.ndarray:
    """Row-wise push-forward of basis probabilities onto classical values."""
    size = 1 << clbits
    b = probs.shape[0]
    if size == probs.shape[1] and np.array_equal(cmap, np.arange(size)):
        return probs
    out = np.zeros((b, size))
    for r in range(b):
        out[r] = np.bincount(cmap, weights=probs[r], minlength=size)
    return out


def _check_width(circuit: Circuit, limit: int) -> None:
    if circuit.width > limit:
        raise WidthLimitExceeded(circuit.width, limit)


# ---------------------------------------------------------------------------
# ideal distribution
# ---------------------------------------------------------------------------
def ideal_probabilities(circuit: Circuit, width_limit: int = DEFAULT_WIDTH_LIMIT) -> Distribution:
    """Exact distribution over the circuit's classical bits.

    Mid-circuit measurements and resets branch the state; branches whose
    probability drops below 1e-12 are discarded.
    """
    prog = Program(circuit, width_limit)
    n = prog.n
    state = np.zeros((1, 1 << n), dtype=complex)
    state[0, 0] = 1.0
    weights = np.ones(1)
    creg = np.zeros(1, dtype=np.int64)
    for op in prog.ops:
        if op.kind == "barrier" or (op.kind == "measure" and op.final):
            continue
        rows = _condition_rows(op, creg)
        if op.kind in ("measure", "reset"):
            state, weights, creg = _branch(state, weights, creg, n, op, rows)
            continue
        if rows is None:
            _apply_unitary(state, n, op)
        elif rows.size:
            sub = state[rows]
            _apply_unitary(sub, n, op)
            state[rows] = sub
    cmap, assign = prog.final_map()
    keep = ~sum(1 << c for c in assign)
    probs = np.abs(state) ** 2
    size = 1 << prog.clbits
    total = np.zeros(size)
    for r in range(state.shape[0]):
        # fold the classical register written mid-circuit with the terminal outcomes
        total += np.bincount(cmap | (creg[r] & keep), weights=probs[r] * weights[r], minlength=size)
    total /= total.sum()
    return Distribution.from_array(prog.clbits, total, cutoff=PRUNE * 1e-3)


def _condition_rows(op: _Op, creg: np.ndarray):
    if op.condition is None:
        return None
    c, v = op.condition
    return np.flatnonzero(((creg >> c) & 1) == v)


def _branch(state, weights, creg, n, op, rows):
    q = op.qubits[0]
    if rows is None:
        rows = np.arange(state.shape[0])
    keep = np.setdiff1d(np.arange(state.shape[0]), rows)
    new_s = [state[keep]]
    new_w = [weights[keep]]
    new_c = [creg[keep]]
    sub = state[rows]
    a0, a1 = _split(sub, n, q)
    p1 = np.sum(np.abs(a1.reshape(len(rows), -1)) ** 2, axis=1)
    for outcome in (0, 1):
        p = p1 if outcome else 1.0 - p1
        ok = weights[rows] * p > PRUNE
        if not ok.any():
            continue
        s = sub[ok].copy()
        b0, b1 = _split(s, n, q)
        (b0 if outcome else b1)[...] = 0
        s /= np.sqrt(p[ok])[:, None]
        c = creg[rows][ok].copy()
        if op.kind == "measure":
            c = (c & ~(1 << op.clbit)) | (outcome << op.clbit)
        elif outcome:
            apply_pauli(s, n, q, 1)
        new_s.append(s)
        new_w.append(weights[rows][ok] * p[ok])
        new_c.append(c)
    return np.concatenate(new_s), np.concatenate(new_w), np.concatenate(new_c)


# ---------------------------------------------------------------------------
# noisy sampling
# ---------------------------------------------------------------------------
def sample_noisy(circuit: Circuit, noise: NoiseModel | None, shots: int, seed,
                 width_limit: int = DEFAULT_WIDTH_LIMIT) -> tuple[Distribution, ExecTiming]:
    """Sample ``shots`` trajectories with depolarizing Pauli insertions.

    After every one-qubit (two-qubit) unitary a uniformly random non-identity
    Pauli hits its qubits with probability ``p1`` (``p2``).  Measurements are
    error-free.  Results depend only on the arguments.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    noise = noise or NoiseModel()
    t0 = time.perf_counter()
    prog = Program(circuit, width_limit)
    if not noise.is_zero and any(op.kind != "barrier" and op.noise_arity == 0 and op.kind not in ("measure", "reset")
                                 for op in prog.ops):
        raise CircuitError("noisy simulation needs gates on at most two qubits; transpile first")
    rng = np.random.default_rng(seed)
    if prog.simple:
        counts = _sample_grouped(prog, noise, shots, rng)
    else:
        counts = _sample_per_shot(prog, noise, shots, rng)
    dist = Distribution(prog.clbits, counts={int(k): int(v) for k, v in enumerate(counts) if v})
    return dist, ExecTiming(t_quantum=time.perf_counter() - t0, shots=shots)


def _error_events(prog: Program, noise: NoiseModel, shots: int, rng: np.random.Generator):
    """Per gate index: (shot indices, Pauli codes) of inserted errors."""
    events = {}
    for g, op in enumerate(prog.ops):
        p = noise.p1 if op.noise_arity == 1 else noise.p2 if op.noise_arity == 2 else 0.0
        if p <= 0:
            continue
        k = int(rng.binomial(shots, p))
        if not k:
            continue
        who = np.sort(rng.choice(shots, size=k, replace=False))
        codes = rng.integers(1, 4 ** op.noise_arity, size=k)
        events[g] = (who, codes)
    return events


def _apply_error(a: np.ndarray, n: int, qubits: tuple[int, ...], code: int) -> None:
    # code's base-4 digits pick the Pauli on each qubit, qubits[0] lowest
    for q in qubits:
        d = code & 3
        if d:
            apply_pauli(a, n, q, d)
        code >>= 2


def _sample_grouped(prog: Program, noise: NoiseModel, shots: int, rng) -> np.ndarray:
    n = prog.n
    events = _error_events(prog, noise, shots, rng)
    history: dict[int, list] = {}
    for g in sorted(events):
        who, codes = events[g]
        for s, c in zip(who.tolist(), codes.tolist()):
            history.setdefault(s, []).append((g, c))
    groups: dict[tuple, int] = {}
    for s in range(shots):
        key = tuple(history.get(s, ()))
        groups[key] = groups.get(key, 0) + 1
    clean = groups.pop((), 0)
    patterns = sorted(groups.items(), key=lambda kv: kv[0])
    cmap, _ = prog.final_map()
    size = 1 << prog.clbits
    counts = np.zeros(size, dtype=np.int64)
    per_batch = max(1, BATCH_BUDGET // (1 << n) - 1)
    chunks = [patterns[i:i + per_batch] for i in range(0, len(patterns), per_batch)] or [[]]
    for ci, chunk in enumerate(chunks):
        mult = [clean if ci == 0 else 0] + [m for _, m in chunk]
        probs = _run_grouped_chunk(prog, [pat for pat, _ in chunk])
        marg = _marginal(probs, cmap, prog.clbits)
        for r, m in enumerate(mult):
            if m:
                p = np.clip(marg[r], 0, None)
                counts += rng.multinomial(m, p / p.sum())
    return counts


def _run_grouped_chunk(prog: Program, patterns: list[tuple]) -> np.ndarray:
    n = prog.n
    rows = 1 + len(patterns)
    state = np.zeros((rows, 1 << n), dtype=complex)
    state[0, 0] = 1.0
    first = [pat[0][0] for pat in patterns]
    errs_at: dict[int, list[tuple[int, int]]] = {}
    for r, pat in enumerate(patterns, start=1):
        for g, c in pat:
            errs_at.setdefault(g, []).append((r, c))
    active = 1
    for blk in prog.blocks:
        _apply_block(state[:active], n, blk.qubits, blk.matrix)
        nxt = active
        while nxt - 1 < len(first) and first[nxt - 1] < blk.stop:
            nxt += 1
        if nxt > active:
            state[active:nxt] = state[0]
            active = nxt
        # errors inside the block, in gate order, as conjugated corrections
        for g in range(blk.start, blk.stop):
            hits = errs_at.get(g)
            if not hits:
                continue
            by_code: dict[int, list[int]] = {}
            for r, c in hits:
                by_code.setdefault(c, []).append(r)
            for c, rs in by_code.items():
                idx = np.array(rs)
                sub = state[idx]
                _apply_block(sub, n, blk.qubits, blk.correction(g, c))
                state[idx] = sub
    return np.abs(state) ** 2


def _sample_per_shot(prog: Program, noise: NoiseModel, shots: int, rng) -> np.ndarray:
    n = prog.n
    per_batch = max(1, BATCH_BUDGET // (1 << n))
    cmap, assign = prog.final_map()
    size = 1 << prog.clbits
    counts = np.zeros(size, dtype=np.int64)
    for start in range(0, shots, per_batch):
        b = min(per_batch, shots - start)
        state = np.zeros((b, 1 << n), dtype=complex)
        state[:, 0] = 1.0
        creg = np.zeros(b, dtype=np.int64)
        for op in prog.ops:
            if op.kind == "barrier" or (op.kind == "measure" and op.final):
                continue
            rows = _condition_rows(op, creg)
            if op.kind in ("measure", "reset"):
                _collapse(state, creg, n, op, rows, rng)
                continue
            if rows is None:
                _apply_unitary(state, n, op)
                rows = np.arange(b)
            elif rows.size:
                sub = state[rows]
                _apply_unitary(sub, n, op)
                state[rows] = sub
            p = noise.p1 if op.noise_arity == 1 else noise.p2 if op.noise_arity == 2 else 0.0
            if p > 0 and rows.size:
                hit = rows[rng.random(rows.size) < p]
                codes = rng.integers(1, 4 ** op.noise_arity, size=hit.size)
                for r, c in zip(hit.tolist(), codes.tolist()):
                    _apply_error(state[r:r + 1], n, op.qubits, c)
        probs = np.abs(state) ** 2
        marg = _marginal(probs, cmap, prog.clbits)
        u = rng.random(b)
        cdf = np.cumsum(marg, axis=1)
        cdf /= cdf[:, -1:]
        outcome = np.minimum((cdf < u[:, None]).sum(axis=1), size - 1)
        # terminal measurements fill their bits; earlier register writes fill the rest
        final_mask = sum(1 << c for c in assign)
        values = (outcome & final_mask) | (creg & ~final_mask)
        counts += np.bincount(values, minlength=size)
    return counts


def _collapse(state, creg, n, op, rows, rng) -> None:
    q = op.qubits[0]
    if rows is None:
        rows = np.arange(state.shape[0])
    if not rows.size:
        return
    sub = state[rows]
    a0, a1 = _split(sub, n, q)
    p1 = np.sum(np.abs(a1.reshape(len(rows), -1)) ** 2, axis=1)
    out = (rng.random(len(rows)) < p1).astype(np.int64)
    keep0 = out == 0
    a1[keep0] = 0
    a0[~keep0] = 0
    norm = np.where(keep0, np.sqrt(np.clip(1 - p1, 1e-300, None)), np.sqrt(np.clip(p1, 1e-300, None)))
    sub /= norm[:, None]
    if op.kind == "measure":
        c = op.clbit
        creg[rows] = (creg[rows] & ~(1 << c)) | (out << c)
    else:
        flip = np.flatnonzero(out)
        if flip.size:
            s = sub[flip]
            apply_pauli(s, n, q, 1)
            sub[flip] = s
    state[rows] = sub


def statevector(circuit: Circuit, width_limit: int = DEFAULT_WIDTH_LIMIT) -> np.ndarray:
    """Final state of a circuit with no measurement, reset or condition."""
    prog = Program(circuit, width_limit)
    state = np.zeros((1, 1 << prog.n), dtype=complex)
    state[0, 0] = 1.0
    for op in prog.ops:
        if op.kind == "barrier" or (op.kind == "measure" and op.final):
            continue
        if op.kind in ("measure", "reset") or op.condition is not None:
            raise CircuitError("statevector() needs a purely unitary circuit")
        _apply_unitary(state, prog.n, op)
    return state[0]
