"""Fourier-transform round trips and phase estimation."""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit
from ..simulator import Distribution
from .common import TWO_PI, InvalidInstance, InvalidSize, ProblemInstance, inverse_qft, measure_into, prepare_basis, qft


def check_qft(name: str, n: int) -> None:
    if n < 1:
        raise InvalidSize(name, n, "needs at least one qubit")


def qft_sample(n: int, rng: np.random.Generator) -> dict:
    return {"x": int(rng.integers(0, 2 ** n))}


def _x(inst: ProblemInstance) -> int:
    x = inst.payload["x"]
    if not 0 <= x < 2 ** inst.n:
        raise InvalidInstance(f"input {x} out of range")
    return x


def qft1_build(inst: ProblemInstance) -> Circuit:
    """Encode x, transform, add one in Fourier space, transform back."""
    n = inst.n
    qs = list(range(n))
    c = Circuit(n, n, name=f"qft1_{n}")
    prepare_basis(c, qs, _x(inst))
    qft(c, qs)
    for j in qs:
        c.p(TWO_PI / 2 ** (j + 1), j)
    inverse_qft(c, qs)
    measure_into(c, qs)
    return c


def qft1_ideal(inst: ProblemInstance) -> Distribution:
    return Distribution.delta(inst.n, (_x(inst) + 1) % 2 ** inst.n)


def qft2_build(inst: ProblemInstance) -> Circuit:
    """Write the Fourier image of x with one-qubit gates, then invert the transform."""
    n = inst.n
    x = _x(inst)
    qs = list(range(n))
    c = Circuit(n, n, name=f"qft2_{n}")
    for j in qs:
        c.h(j)
        c.p(TWO_PI * x / 2 ** (j + 1), j)
    inverse_qft(c, qs)
    measure_into(c, qs)
    return c


def qft2_ideal(inst: ProblemInstance) -> Distribution:
    return Distribution.delta(inst.n, _x(inst))


# -- phase estimation ---------------------------------------------------------
def check_pe(n: int) -> None:
    if n < 2:
        raise InvalidSize("PE", n, "needs one counting and one eigenstate qubit")


def pe_sample(n: int, rng: np.random.Generator) -> dict:
    k = n - 1
    return {"numerator": int(rng.integers(1, 2 ** k))}


def controlled_powers(c: Circuit, counting, body) -> None:
    """Counting qubit j controls the 2**(k-1-j)-th power, matching the swap-free inverse QFT."""
    k = len(counting)
    for j, q in enumerate(counting):
        body(c, q, 2 ** (k - 1 - j))


def pe_circuit(k: int, theta: float, name: str = "pe") -> Circuit:
    """Estimate the eigenphase ``theta`` (in turns) of a phase gate with k counting qubits."""
    counting = list(range(k))
    target = k
    c = Circuit(k + 1, k, name=name)
    c.x(target)
    for q in counting:
        c.h(q)
    controlled_powers(c, counting, lambda cc, q, power: cc.cp(TWO_PI * theta * power, q, target))
    inverse_qft(c, counting)
    measure_into(c, counting)
    return c


def pe_build(inst: ProblemInstance) -> Circuit:
    n = inst.n
    k = n - 1
    m = inst.payload["numerator"]
    if not 0 < m < 2 ** k:
        raise InvalidInstance(f"phase numerator {m} out of range")
    return pe_circuit(k, m / 2 ** k, name=f"pe{n}")


def pe_ideal(inst: ProblemInstance) -> Distribution:
    return Distribution.delta(inst.n - 1, inst.payload["numerator"])
