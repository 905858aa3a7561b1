"""Deutsch-Jozsa, Bernstein-Vazirani (wide and qubit-reusing) and Hidden Shift."""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit
from ..simulator import Distribution
from .common import InvalidInstance, InvalidSize, ProblemInstance, bits_of


def check_data_bits(name: str, n: int) -> None:
    if n < 2:
        raise InvalidSize(name, n, "needs at least 2 data bits")


def _phase_kickback_frame(n: int, name: str) -> Circuit:
    c = Circuit(n + 1, n, name=name)
    c.x(n)
    c.h(n)
    for q in range(n):
        c.h(q)
    return c


def _close(c: Circuit, n: int) -> Circuit:
    for q in range(n):
        c.h(q)
    for q in range(n):
        c.measure(q, q)
    return c


# -- Deutsch-Jozsa ----------------------------------------------------------
def dj_sample(n: int, rng: np.random.Generator) -> dict:
    return {"kind": "balanced" if rng.random() < 0.5 else "constant"}


def dj_build(inst: ProblemInstance) -> Circuit:
    n = inst.n
    kind = inst.payload["kind"]
    if kind not in ("constant", "balanced"):
        raise InvalidInstance(f"unknown oracle kind {kind!r}")
    c = _phase_kickback_frame(n, f"dj{n}")
    if kind == "balanced":
        # parity of the input bits
        for q in range(n):
            c.cx(q, n)
    return _close(c, n)


def dj_ideal(inst: ProblemInstance) -> Distribution:
    n = inst.n
    return Distribution.delta(n, 0 if inst.payload["kind"] == "constant" else 2 ** n - 1)


# -- Bernstein-Vazirani ------------------------------------------------------
def bv_sample(n: int, rng: np.random.Generator) -> dict:
    return {"secret": int(rng.integers(0, 2 ** n))}


def _secret(inst: ProblemInstance) -> int:
    s = inst.payload["secret"]
    if not 0 <= s < 2 ** inst.n:
        raise InvalidInstance(f"secret {s} out of range for {inst.n} bits")
    return s


def bv1_build(inst: ProblemInstance) -> Circuit:
    n = inst.n
    s = _secret(inst)
    c = _phase_kickback_frame(n, f"bv1_{n}")
    for q, b in enumerate(bits_of(s, n)):
        if b:
            c.cx(q, n)
    return _close(c, n)


def bv2_build(inst: ProblemInstance) -> Circuit:
    """Two-qubit version: one data qubit is measured and recycled for every bit."""
    n = inst.n
    s = _secret(inst)
    c = Circuit(2, n, name=f"bv2_{n}")
    c.x(1)
    c.h(1)
    for i, b in enumerate(bits_of(s, n)):
        if i:
            c.reset(0)
        c.h(0)
        if b:
            c.cx(0, 1)
        c.h(0)
        c.measure(0, i)
    return c


def bv_ideal(inst: ProblemInstance) -> Distribution:
    return Distribution.delta(inst.n, _secret(inst))


# -- Hidden Shift ------------------------------------------------------------
def check_hs(n: int) -> None:
    if n < 2 or n % 2:
        raise InvalidSize("HS", n, "needs an even number of qubits >= 2")


def hs_sample(n: int, rng: np.random.Generator) -> dict:
    return {"shift": int(rng.integers(0, 2 ** n))}


def _cz_pairs(c: Circuit, n: int) -> None:
    for q in range(0, n, 2):
        c.cz(q, q + 1)


def hs_build(inst: ProblemInstance) -> Circuit:
    n = inst.n
    check_hs(n)
    s = inst.payload["shift"]
    if not 0 <= s < 2 ** n:
        raise InvalidInstance(f"shift {s} out of range")
    flips = [q for q, b in enumerate(bits_of(s, n)) if b]
    c = Circuit(n, n, name=f"hs{n}")
    for q in range(n):
        c.h(q)
    # shifted bent-function oracle
    for q in flips:
        c.x(q)
    _cz_pairs(c, n)
    for q in flips:
        c.x(q)
    for q in range(n):
        c.h(q)
    # dual oracle
    _cz_pairs(c, n)
    for q in range(n):
        c.h(q)
    for q in range(n):
        c.measure(q, q)
    return c


def hs_ideal(inst: ProblemInstance) -> Distribution:
    return Distribution.delta(inst.n, inst.payload["shift"])
