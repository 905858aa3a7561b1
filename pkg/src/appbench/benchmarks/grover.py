"""Grover search for one marked string."""
from __future__ import annotations

import math

import numpy as np

from ..circuit import Circuit
from ..simulator import Distribution
from .common import InvalidInstance, InvalidSize, ProblemInstance, bits_of, measure_into


def check(n: int) -> None:
    if n < 2:
        raise InvalidSize("GROVER", n, "needs at least 2 qubits")


def iterations(n: int) -> int:
    return int(math.floor(math.pi / 4 * math.sqrt(2 ** n)))


def marked_probability(n: int, k: int | None = None) -> float:
    k = iterations(n) if k is None else k
    return math.sin((2 * k + 1) * math.asin(2 ** (-n / 2))) ** 2


def sample(n: int, rng: np.random.Generator) -> dict:
    return {"marked": int(rng.integers(0, 2 ** n))}


def _marked(inst: ProblemInstance) -> int:
    m = inst.payload["marked"]
    if not 0 <= m < 2 ** inst.n:
        raise InvalidInstance(f"marked string {m} out of range")
    return m


def _flip_zeros(c: Circuit, n: int, value: int) -> None:
    for q, b in enumerate(bits_of(value, n)):
        if not b:
            c.x(q)


def build(inst: ProblemInstance) -> Circuit:
    n = inst.n
    check(n)
    m = _marked(inst)
    qs = list(range(n))
    c = Circuit(n, n, name=f"grover{n}")
    for q in qs:
        c.h(q)
    for _ in range(iterations(n)):
        # oracle: phase -1 on the marked string
        _flip_zeros(c, n, m)
        c.mcp(math.pi, qs)
        _flip_zeros(c, n, m)
        # diffusion
        for q in qs:
            c.h(q)
            c.x(q)
        c.mcp(math.pi, qs)
        for q in qs:
            c.x(q)
            c.h(q)
    measure_into(c, qs)
    return c


def ideal(inst: ProblemInstance) -> Distribution:
    n = inst.n
    m = _marked(inst)
    pm = marked_probability(n)
    rest = (1 - pm) / (2 ** n - 1)
    probs = np.full(2 ** n, rest)
    probs[m] = pm
    return Distribution.from_array(n, probs)
