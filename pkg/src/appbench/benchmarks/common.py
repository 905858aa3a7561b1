"""Shared pieces of the benchmark generators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..circuit import Circuit, CircuitError

TWO_PI = 2 * math.pi


class InvalidSize(ValueError):
    def __init__(self, benchmark: str, n: int, reason: str):
        super().__init__(f"{benchmark}: size {n} is not valid ({reason})")
        self.benchmark = benchmark
        self.n = n


class InvalidInstance(CircuitError):
    pass


@dataclass
class ProblemInstance:
    benchmark: str
    n: int
    payload: dict[str, Any] = field(default_factory=dict)

    def summary(self) -> dict:
        """JSON-friendly payload with bulky entries shortened."""
        out = {}
        for k, v in self.payload.items():
            if k in ("terms", "hamiltonian"):
                out[k] = f"{len(v)} terms"
            elif isinstance(v, (list, tuple)):
                out[k] = [round(x, 12) if isinstance(x, float) else x for x in v]
            elif isinstance(v, float):
                out[k] = round(v, 12)
            else:
                out[k] = v
        return out


def bits_of(value: int, n: int) -> list[int]:
    return [(value >> i) & 1 for i in range(n)]


def prepare_basis(c: Circuit, qubits: Sequence[int], value: int) -> None:
    for i, q in enumerate(qubits):
        if (value >> i) & 1:
            c.x(q)


def qft(c: Circuit, qubits: Sequence[int]) -> None:
    """Swap-free QFT: afterwards qubit ``qubits[j]`` carries phase ``2*pi*x / 2**(j+1)``."""
    m = len(qubits)
    for j in range(m - 1, -1, -1):
        c.h(qubits[j])
        for i in range(j - 1, -1, -1):
            c.cp(TWO_PI / 2 ** (j - i + 1), qubits[i], qubits[j])


def inverse_qft(c: Circuit, qubits: Sequence[int]) -> None:
    m = len(qubits)
    for j in range(m):
        for i in range(j):
            c.cp(-TWO_PI / 2 ** (j - i + 1), qubits[i], qubits[j])
        c.h(qubits[j])


def measure_into(c: Circuit, qubits: Sequence[int]) -> None:
    for i, q in enumerate(qubits):
        c.measure(q, i)
