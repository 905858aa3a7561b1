"""Exact noisy distributions by density-matrix evolution (small circuits only).

Built from dense embedded matrices so it shares nothing with the trajectory
kernels it is used to validate.
"""
from __future__ import annotations

import itertools

import numpy as np

from .circuit import Circuit, CircuitError
from .matrices import PAULIS, embed, gate_matrix
from .simulator import Distribution, NoiseModel, WidthLimitExceeded

DENSITY_WIDTH_LIMIT = 6


def _pauli_ops(qubits, n):
    out = []
    for combo in itertools.product(range(4), repeat=len(qubits)):
        if any(combo):
            m = np.ones((1, 1), dtype=complex)
            for c in combo:
                m = np.kron(PAULIS[c], m)
            out.append(embed(m, qubits, n))
    return out


def density_oracle(circuit: Circuit, noise: NoiseModel | None = None) -> Distribution:
    """Noisy output distribution with a depolarizing channel after each 1q/2q unitary."""
    n = circuit.width
    if n > DENSITY_WIDTH_LIMIT:
        raise WidthLimitExceeded(n, DENSITY_WIDTH_LIMIT)
    noise = noise or NoiseModel()
    dim = 2 ** n
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    measured: dict[int, int] = {}
    done: set[int] = set()
    for g in circuit:
        if g.name == "barrier":
            continue
        if g.name == "measure":
            measured[g.clbit] = g.qubits[0]
            done.add(g.qubits[0])
            continue
        if not g.is_unitary or g.condition is not None or done & set(g.qubits):
            raise CircuitError("density_oracle supports terminal measurements only")
        u = embed(gate_matrix(g), g.qubits, n)
        rho = u @ rho @ u.conj().T
        k = len(g.qubits)
        p = noise.p1 if k == 1 else noise.p2 if k == 2 else 0.0
        if k > 2 and not noise.is_zero:
            raise CircuitError("noise is defined for one- and two-qubit gates only")
        if p > 0:
            ops = _pauli_ops(g.qubits, n)
            mixed = sum(P @ rho @ P.conj().T for P in ops)
            rho = (1 - p) * rho + p / len(ops) * mixed
    diag = np.real(np.diag(rho)).clip(0)
    out = np.zeros(2 ** circuit.clbits)
    for idx in range(dim):
        v = 0
        for c, q in measured.items():
            v |= ((idx >> q) & 1) << c
        out[v] += diag[idx]
    return Distribution.from_array(circuit.clbits, out / out.sum())
