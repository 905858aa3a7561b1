"""Order finding with QFT-adder modular exponentiation.

Arithmetic follows the Draper/Beauregard construction: a Fourier-space
adder, a doubly controlled modular adder, a controlled modular
multiplier, and a controlled in-place multiply built from two
multipliers around a controlled swap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..circuit import Circuit
from ..simulator import Distribution, ideal_probabilities
from .common import TWO_PI, InvalidInstance, InvalidSize, ProblemInstance, inverse_qft, measure_into, qft

# n = 2 has no semiprime, so the prime 3 stands in; n = 3 keeps 6 = 2*3 and
# drops the prime square 4
_SPECIAL = {2: [3], 3: [6]}


def _is_semiprime(v: int) -> bool:
    f = 0
    d = 2
    while d * d <= v:
        while v % d == 0:
            v //= d
            f += 1
        d += 1
    if v > 1:
        f += 1
    return f == 2


def moduli(n: int) -> list[int]:
    if n in _SPECIAL:
        return list(_SPECIAL[n])
    return [v for v in range(2 ** (n - 1), 2 ** n) if _is_semiprime(v)]


def order(a: int, N: int) -> int:
    """Multiplicative order of a mod N by brute force."""
    if math.gcd(a, N) != 1:
        raise InvalidInstance(f"{a} is not a unit mod {N}")
    v, r = a % N, 1
    while v != 1 % N:
        v = v * a % N
        r += 1
    return r


def check(name: str, n: int) -> None:
    if n < 2:
        raise InvalidSize(name, n, "modulus needs at least 2 bits")


def sample(n: int, rng: np.random.Generator) -> dict:
    cands = moduli(n)
    N = int(cands[rng.integers(len(cands))])
    units = [a for a in range(2, N) if math.gcd(a, N) == 1 and order(a, N) > 1]
    a = int(units[rng.integers(len(units))])
    return {"N": N, "a": a, "r": order(a, N)}


@dataclass
class Layout:
    counting: list[int]
    x: list[int]
    b: list[int]
    anc: int
    width: int


def layout(kind: str, n: int) -> Layout:
    if kind == "SHOR1":
        c = list(range(2 * n))
        x = list(range(2 * n, 3 * n))
        b = list(range(3 * n, 4 * n + 1))
        return Layout(c, x, b, 4 * n + 1, 4 * n + 2)
    x = list(range(1, n + 1))
    b = list(range(n + 1, 2 * n + 2))
    return Layout([0], x, b, 2 * n + 2, 2 * n + 3)


def _validate(inst: ProblemInstance) -> tuple[int, int]:
    N, a = int(inst.payload["N"]), int(inst.payload["a"])
    n = inst.n
    if not 1 < N < 2 ** n:
        raise InvalidInstance(f"modulus {N} does not fit in {n} bits")
    if math.gcd(a, N) != 1 or not 1 < a < N:
        raise InvalidInstance(f"{a} is not a non-trivial unit mod {N}")
    if "r" in inst.payload and order(a, N) != inst.payload["r"]:
        raise InvalidInstance("stored order does not match a and N")
    return N, a


# -- arithmetic ------------------------------------------------------------------
def phi_add(c: Circuit, value: int, b: Sequence[int], controls: Sequence[int] = ()) -> None:
    """Add a classical constant to a register held in (swap-free) Fourier space."""
    for j, q in enumerate(b):
        lam = TWO_PI * value / 2 ** (j + 1)
        lam = math.remainder(lam, TWO_PI)
        if abs(lam) < 1e-15:
            continue
        if controls:
            c.mcp(lam, list(controls) + [q])
        else:
            c.p(lam, q)


def phi_add_mod(c: Circuit, value: int, N: int, b: Sequence[int], anc: int, controls: Sequence[int]) -> None:
    """b <- b + value mod N when all controls are set; b < N, b in Fourier space."""
    top = b[-1]
    phi_add(c, value, b, controls)
    phi_add(c, -N, b)
    inverse_qft(c, b)
    c.cx(top, anc)
    qft(c, b)
    phi_add(c, N, b, [anc])
    phi_add(c, -value, b, controls)
    inverse_qft(c, b)
    c.x(top)
    c.cx(top, anc)
    c.x(top)
    qft(c, b)
    phi_add(c, value, b, controls)


def cmult(c: Circuit, value: int, N: int, x: Sequence[int], b: Sequence[int], anc: int, ctrl: int) -> None:
    """b <- b + value * x mod N, controlled on ``ctrl``."""
    qft(c, b)
    for i, xq in enumerate(x):
        phi_add_mod(c, value * 2 ** i % N, N, b, anc, [ctrl, xq])
    inverse_qft(c, b)


def controlled_mult(c: Circuit, value: int, N: int, lay: Layout, ctrl: int) -> None:
    """x <- value * x mod N when ``ctrl`` is set (b and anc start and end in 0)."""
    cmult(c, value, N, lay.x, lay.b, lay.anc, ctrl)
    for xq, bq in zip(lay.x, lay.b):
        c.cx(bq, xq)
        c.mcx([ctrl, xq], bq)
        c.cx(bq, xq)
    undo = Circuit(c.width)
    cmult(undo, pow(value, -1, N), N, lay.x, lay.b, lay.anc, ctrl)
    c.compose(undo.inverse())


# -- circuits ---------------------------------------------------------------------
def build_shor1(inst: ProblemInstance) -> Circuit:
    n = inst.n
    N, a = _validate(inst)
    lay = layout("SHOR1", n)
    m = len(lay.counting)
    c = Circuit(lay.width, m, name=f"shor1_{n}")
    c.x(lay.x[0])
    for q in lay.counting:
        c.h(q)
    for j, q in enumerate(lay.counting):
        controlled_mult(c, pow(a, 2 ** (m - 1 - j), N), N, lay, q)
    inverse_qft(c, lay.counting)
    measure_into(c, lay.counting)
    return c


def build_shor2(inst: ProblemInstance) -> Circuit:
    """One recycled control qubit; the inverse QFT becomes measurement-conditioned phases."""
    n = inst.n
    N, a = _validate(inst)
    lay = layout("SHOR2", n)
    m = 2 * n
    q = lay.counting[0]
    c = Circuit(lay.width, m, name=f"shor2_{n}")
    c.x(lay.x[0])
    for j in range(m):
        if j:
            c.reset(q)
        c.h(q)
        controlled_mult(c, pow(a, 2 ** (m - 1 - j), N), N, lay, q)
        for i in range(j):
            c.p(-TWO_PI / 2 ** (j - i + 1), q, condition=(i, 1))
        c.h(q)
        c.measure(q, j)
    return c


def ideal(inst: ProblemInstance) -> Distribution:
    build = build_shor1 if inst.benchmark == "SHOR1" else build_shor2
    return ideal_probabilities(build(inst))


def peak_outcomes(n: int, r: int) -> list[int]:
    """Readouts that are exact multiples of 2**(2n) / r (when r divides it)."""
    size = 2 ** (2 * n)
    return [round(k * size / r) % size for k in range(r)]
