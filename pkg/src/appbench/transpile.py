"""Exact, ancilla-free lowering of circuits onto the standard basis {rx, ry, rz, cx}.

Every rule is exact up to a global phase.  The only post-processing is angle
reduction into (-pi, pi] and elision of zero-angle rotations, so the depth of
the output is a reproducible property of the input circuit.
"""
from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate, depth
from .matrices import gate_matrix
from .synthesis import canonical_angle, canonical_gates, decompose_2q, one_qubit_gates, zyz_angles

PI = math.pi
STANDARD_UNITARY = frozenset({"rx", "ry", "rz", "cx"})
STANDARD = STANDARD_UNITARY | {"measure", "reset", "barrier"}
ZERO_ANGLE = 1e-12


class UnsupportedGate(CircuitError):
    def __init__(self, kind: str):
        super().__init__(f"no decomposition registered for gate {kind!r}")
        self.kind = kind


def _rot(name: str, q: int, theta: float) -> Gate:
    return Gate(name, (q,), (float(theta),))


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------
def decompose_cp(theta: float, control: int, target: int) -> list[Gate]:
    """Controlled phase as rz, cx, rz, cx, rz."""
    return [
        _rot("rz", control, theta / 2),
        Gate("cx", (control, target)),
        _rot("rz", target, -theta / 2),
        Gate("cx", (control, target)),
        _rot("rz", target, theta / 2),
    ]


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def decompose_mcp(lam: float, qubits: Sequence[int]) -> list[Gate]:
    """Phase ``exp(i*lam)`` on the all-ones state of ``qubits``.

    The phase polynomial ``lam * x0*x1*...*x_{m-1}`` is expanded over parities
    of all non-empty subsets; subsets sharing a highest qubit are visited in
    gray-code order so each step costs one cx.  Uses ``2**m - 2`` cx.
    """
    m = len(qubits)
    scale = lam / 2 ** (m - 1)
    out: list[Gate] = []
    for j in range(m):
        tgt = qubits[j]
        for t in range(2 ** j):
            if t:
                flip = (t & -t).bit_length() - 1
                out.append(Gate("cx", (qubits[flip], tgt)))
            size = 1 + bin(_gray(t)).count("1")
            out.append(_rot("rz", tgt, scale if size % 2 else -scale))
        if j:
            out.append(Gate("cx", (qubits[j - 1], tgt)))
    return out


def multiplexed_rotation(axis: str, angles: Sequence[float], controls: Sequence[int], target: int) -> list[Gate]:
    """Uniformly controlled rotation: ``R_axis(angles[x])`` on ``target`` when the controls read ``x``.

    ``axis`` is ``"ry"`` or ``"rz"``; ``2**k`` rotations interleaved with ``2**k`` cx.
    """
    k = len(controls)
    if len(angles) != 2 ** k:
        raise ValueError(f"need {2 ** k} angles for {k} controls")
    if k == 0:
        return [_rot(axis, target, angles[0])]
    theta = np.asarray(angles, dtype=float)
    xs = np.arange(2 ** k)
    out: list[Gate] = []
    for i in range(2 ** k):
        g = _gray(i)
        signs = np.array([1 - 2 * (bin(x & g).count("1") & 1) for x in xs])
        out.append(_rot(axis, target, float(signs @ theta) / 2 ** k))
        flip = k - 1 if i == 2 ** k - 1 else (((i + 1) & -(i + 1)).bit_length() - 1)
        out.append(Gate("cx", (controls[flip], target)))
    return out


def decompose_mcx(controls: Sequence[int], target: int) -> list[Gate]:
    """Multi-controlled X with no ancilla: ry-conjugated gray-code multi-controlled Z."""
    controls = list(controls)
    if len(controls) == 1:
        return [Gate("cx", (controls[0], target))]
    return (
        [_rot("ry", target, -PI / 2)]
        + decompose_mcp(PI, controls + [target])
        + [_rot("ry", target, PI / 2)]
    )


def decompose_mcu(u: np.ndarray, controls: Sequence[int], target: int) -> list[Gate]:
    """Multi-controlled single-qubit unitary via ZYZ and multiplexed rotations."""
    controls = list(controls)
    alpha, phi, theta, lam = zyz_angles(u)
    zeros = [0.0] * (2 ** len(controls) - 1)
    out: list[Gate] = []
    for axis, ang in (("rz", lam), ("ry", theta), ("rz", phi)):
        if abs(canonical_angle(ang)) > ZERO_ANGLE:
            out += multiplexed_rotation(axis, zeros + [ang], controls, target)
    if abs(canonical_angle(alpha)) > ZERO_ANGLE:
        if len(controls) == 1:
            out.append(_rot("rz", controls[0], alpha))
        else:
            out += decompose_mcp(alpha, controls)
    return out


def _lower_1q(g: Gate) -> list[Gate]:
    q = g.qubits[0]
    n = g.name
    if n in ("rx", "ry", "rz"):
        return [_rot(n, q, g.params[0])]
    if n == "p":
        return [_rot("rz", q, g.params[0])]
    fixed = {
        "id": [],
        "x": [("rx", PI)],
        "y": [("ry", PI)],
        "z": [("rz", PI)],
        "h": [("rz", PI / 2), ("rx", PI / 2), ("rz", PI / 2)],
        "s": [("rz", PI / 2)],
        "sdg": [("rz", -PI / 2)],
        "t": [("rz", PI / 4)],
        "tdg": [("rz", -PI / 4)],
        "sx": [("rx", PI / 2)],
    }
    if n in fixed:
        return [_rot(a, q, t) for a, t in fixed[n]]
    if n == "u":
        return one_qubit_gates(g.matrix, q)
    raise UnsupportedGate(n)


def _lower(g: Gate) -> list[Gate]:
    n, q, p = g.name, g.qubits, g.params
    if n in ("measure", "reset", "barrier", "cx"):
        return [g]
    if n == "mcp":
        return decompose_mcp(p[0], q)
    if len(q) == 1:
        return _lower_1q(g)
    if n == "cz":
        return [_rot("ry", q[1], PI / 2), Gate("cx", q), _rot("ry", q[1], -PI / 2)]
    if n == "cp":
        return decompose_cp(p[0], q[0], q[1])
    if n == "swap":
        a, b = q
        return [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
    if n in ("ccx", "mcx"):
        return decompose_mcx(q[:-1], q[-1])
    if n == "mcu":
        return decompose_mcu(g.matrix, q[:-1], q[-1])
    if n == "ucry":
        return multiplexed_rotation("ry", p, q[:-1], q[-1])
    if n == "can":
        return canonical_gates(*p, q[0], q[1])
    if n == "unitary2q":
        return decompose_2q(g.matrix, q[0], q[1])
    raise UnsupportedGate(n)


def transpile_standard(circuit: Circuit) -> Circuit:
    """Lower ``circuit`` onto {rx, ry, rz, cx, measure, reset, barrier}.

    Conditions on a source gate are copied onto every gate it expands into.
    Rotation angles are reduced into (-pi, pi]; rotations by zero are dropped.
    """
    if not circuit.is_bound:
        raise CircuitError("transpile_standard needs a fully bound circuit")
    out = circuit.empty_like()
    out.name = circuit.name
    for g in circuit:
        for h in _lower(g):
            if h.name in ("rx", "ry", "rz"):
                theta = canonical_angle(h.params[0])
                if abs(theta) <= ZERO_ANGLE:
                    continue
                h = replace(h, params=(theta,))
            if g.condition is not None:
                h = replace(h, condition=g.condition)
            out.append(h)
    return out


def is_standard(circuit: Circuit) -> bool:
    return all(g.name in STANDARD for g in circuit)


def normalized_depth(circuit: Circuit) -> int:
    return depth(transpile_standard(circuit))


# ---------------------------------------------------------------------------
# adding a control to a whole circuit
# ---------------------------------------------------------------------------
def _controlled_gate(g: Gate, c: int) -> list[Gate]:
    n, q, p = g.name, g.qubits, g.params
    if g.condition is not None or not g.is_unitary:
        if n == "barrier":
            return [g]
        raise CircuitError(f"cannot add a control to {n}")
    if n == "id":
        return []
    if n == "x":
        return [Gate("cx", (c, q[0]))]
    if n == "cx":
        return [Gate("mcx", (q[0], c, q[1]))]
    if n in ("ccx", "mcx"):
        return [Gate("mcx", (*q[:-1], c, q[-1]))]
    if n == "p":
        return [Gate("cp", (c, q[0]), p)]
    if n == "z":
        return [Gate("cz", (c, q[0]))]
    if n == "cz":
        return [Gate("mcp", (*q, c), (PI,))]
    if n in ("cp", "mcp"):
        return [Gate("mcp", (*q, c), p)]
    if n == "swap":
        a, b = q
        return [Gate("cx", (b, a)), Gate("mcx", (c, a, b)), Gate("cx", (b, a))]
    if n == "ucry":
        return [Gate("ucry", (*q[:-1], c, q[-1]), (0.0,) * len(p) + tuple(p))]
    if n == "mcu":
        return [Gate("mcu", (*q[:-1], c, q[-1]), matrix=g.matrix)]
    if len(q) == 1:
        return [Gate("mcu", (c, q[0]), matrix=gate_matrix(g))]
    raise CircuitError(f"cannot add a control to {n}")


def controlled_circuit(circuit: Circuit, control: int, width: int | None = None) -> Circuit:
    """Return ``circuit`` with every gate additionally controlled on qubit ``control``.

    The global phase of each gate is preserved, so the result is exactly the
    controlled version of the circuit's unitary.
    """
    if control in {q for g in circuit for q in g.qubits}:
        raise CircuitError("control qubit already used by the circuit")
    out = Circuit(width or circuit.width, circuit.clbits, circuit.name + "_ctrl")
    for g in circuit:
        out.extend(_controlled_gate(g, control))
    return out


def map_gates(gates: Iterable[Gate], fn: Callable[[Gate], list[Gate]]) -> list[Gate]:
    out: list[Gate] = []
    for g in gates:
        out.extend(fn(g))
    return out
