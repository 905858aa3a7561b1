"""Dense gate matrices and brute-force circuit unitaries.

This is the reference path used to check decompositions and the simulator; it
builds full matrices with Kronecker products and never shares code with the
batched kernels in :mod:`appbench.simulator`.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, CircuitError, Gate

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULIS = (I2, X, Y, Z)

_FIXED = {
    "id": I2,
    "x": X,
    "y": Y,
    "z": Z,
    "h": H,
    "s": np.diag([1, 1j]),
    "sdg": np.diag([1, -1j]),
    "t": np.diag([1, np.exp(1j * np.pi / 4)]),
    "tdg": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "sx": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
}


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def phase(lam: float) -> np.ndarray:
    return np.diag([1, np.exp(1j * lam)])


def kron_le(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor on the least significant qubit."""
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(m, out)
    return out


def controlled(u: np.ndarray, num_controls: int) -> np.ndarray:
    """``u`` on the most significant qubit(s), active when all low control bits are 1."""
    k = num_controls
    du = u.shape[0]
    dc = 2 ** k
    out = np.eye(dc * du, dtype=complex)
    ones = dc - 1
    idx = [ones + dc * t for t in range(du)]
    out[np.ix_(idx, idx)] = u
    return out


def canonical(a: float, b: float, c: float) -> np.ndarray:
    """exp(i*(a XX + b YY + c ZZ))."""
    out = np.eye(4, dtype=complex)
    for coef, p in ((a, X), (b, Y), (c, Z)):
        pp = np.kron(p, p)
        out = (np.cos(coef) * np.eye(4) + 1j * np.sin(coef) * pp) @ out
    return out


def gate_matrix(g: Gate) -> np.ndarray:
    """Matrix of a unitary gate on its own qubits (``g.qubits[0]`` least significant)."""
    n, p = g.name, g.params
    if any(not isinstance(v, (int, float, np.floating)) for v in p):
        raise CircuitError(f"gate {n} has unbound parameters")
    if n in _FIXED:
        return _FIXED[n].astype(complex)
    if n == "rx":
        return rx(p[0])
    if n == "ry":
        return ry(p[0])
    if n == "rz":
        return rz(p[0])
    if n == "p":
        return phase(p[0])
    if n in ("u", "unitary2q"):
        return np.array(g.matrix, dtype=complex)
    if n == "cx":
        return controlled(X, 1)
    if n == "cz":
        return controlled(Z, 1)
    if n == "cp":
        return controlled(phase(p[0]), 1)
    if n == "swap":
        return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    if n in ("ccx", "mcx"):
        return controlled(X, len(g.qubits) - 1)
    if n == "mcu":
        return controlled(g.matrix, len(g.qubits) - 1)
    if n == "mcp":
        d = np.ones(2 ** len(g.qubits), dtype=complex)
        d[-1] = np.exp(1j * p[0])
        return np.diag(d)
    if n == "can":
        return canonical(*p)
    if n == "ucry":
        k = len(g.qubits) - 1
        dc = 2 ** k
        out = np.zeros((2 * dc, 2 * dc), dtype=complex)
        for j, theta in enumerate(p):
            idx = [j, j + dc]
            out[np.ix_(idx, idx)] = ry(theta)
        return out
    raise CircuitError(f"no matrix for gate {n}")


def embed(m: np.ndarray, qubits, n: int) -> np.ndarray:
    """Lift a k-qubit matrix acting on ``qubits`` to the full n-qubit space."""
    k = len(qubits)
    # tensor axes: row bits then column bits, most significant qubit first
    t = m.reshape([2] * (2 * k))
    full = np.eye(2 ** n, dtype=complex).reshape([2] * (2 * n))
    # axis of qubit q in an n-qubit tensor (MSB first) is n-1-q
    row_axes = [n - 1 - q for q in reversed(qubits)]
    # contract m's column axes with full's row axes for the selected qubits
    out = np.tensordot(t, full, axes=(list(range(k, 2 * k)), row_axes))
    # out axes: m row axes (k) + remaining full axes; move m rows back into place
    remaining = [a for a in range(2 * n) if a not in row_axes]
    order = [None] * (2 * n)
    for i, a in enumerate(row_axes):
        order[a] = i
    for i, a in enumerate(remaining):
        order[a] = k + i
    return np.transpose(out, order).reshape(2 ** n, 2 ** n)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full unitary of a circuit with no measurement, reset or conditions."""
    n = circuit.width
    u = np.eye(2 ** n, dtype=complex)
    for g in circuit:
        if g.name == "barrier":
            continue
        if not g.is_unitary or g.condition is not None:
            raise CircuitError(f"circuit_unitary cannot handle {g.name} / conditions")
        u = embed(gate_matrix(g), g.qubits, n) @ u
    return u


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance between ``a`` and ``b`` after removing the best global phase."""
    overlap = np.vdot(a, b)
    ph = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(a * ph - b)))
