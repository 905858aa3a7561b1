"""UCCSD-style ansatz built from Jordan-Wigner Pauli exponentials.

Pauli words are written most-significant qubit first, the same order as
measured bit strings: character ``k`` of an ``n``-letter word acts on
qubit ``n - 1 - k``.
"""
from __future__ import annotations

import itertools
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..circuit import Circuit, Param, bind_params
from ..simulator import Distribution, ideal_probabilities
from .common import InvalidInstance, InvalidSize, ProblemInstance, measure_into

PAULI_CHARS = "IXYZ"
EXAMPLE_TERMS = "h4_example.txt"

# (a, b) -> (phase, product) for single-qubit Pauli letters
_MUL = {}
for _a in PAULI_CHARS:
    for _b in PAULI_CHARS:
        if _a == "I":
            _MUL[_a, _b] = (1, _b)
        elif _b == "I":
            _MUL[_a, _b] = (1, _a)
        elif _a == _b:
            _MUL[_a, _b] = (1, "I")
        else:
            third = ({"X", "Y", "Z"} - {_a, _b}).pop()
            cyclic = (_a, _b) in (("X", "Y"), ("Y", "Z"), ("Z", "X"))
            _MUL[_a, _b] = (1j if cyclic else -1j, third)


class IndexOutOfRange(ValueError):
    pass


class PauliTermList(list):
    """List of ``(coefficient, word)`` pairs; all words share one length."""

    @property
    def num_qubits(self) -> int:
        return len(self[0][1]) if self else 0

    def validate(self) -> "PauliTermList":
        lengths = {len(w) for _, w in self}
        if len(lengths) > 1:
            raise ValueError(f"Pauli words of mixed lengths {sorted(lengths)}")
        for _, w in self:
            if set(w) - set(PAULI_CHARS):
                raise ValueError(f"bad Pauli word {w!r}")
        return self

    def as_dict(self) -> dict[str, complex]:
        out: dict[str, complex] = {}
        for c, w in self:
            out[w] = out.get(w, 0) + c
        return out


def multiply(a: dict[str, complex], b: dict[str, complex]) -> dict[str, complex]:
    out: dict[str, complex] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            phase = 1
            letters = []
            for x, y in zip(wa, wb):
                ph, z = _MUL[x, y]
                phase *= ph
                letters.append(z)
            w = "".join(letters)
            out[w] = out.get(w, 0) + ca * cb * phase
    return {w: c for w, c in out.items() if abs(c) > 1e-14}


def _word(n: int, ops: dict[int, str]) -> str:
    return "".join(ops.get(n - 1 - k, "I") for k in range(n))


def jordan_wigner(p: int, n: int, dagger: bool = True) -> PauliTermList:
    """Creation (``dagger``) or annihilation operator on mode ``p``.

    ``a_p^dag = Z_0 ... Z_{p-1} (X_p - i Y_p) / 2``.
    """
    if not 0 <= p < n:
        raise IndexOutOfRange(f"mode {p} outside 0..{n - 1}")
    zs = {q: "Z" for q in range(p)}
    sign = -0.5j if dagger else 0.5j
    return PauliTermList([(0.5 + 0j, _word(n, {**zs, p: "X"})), (sign, _word(n, {**zs, p: "Y"}))])


def _op_product(modes: Sequence[tuple[int, bool]], n: int) -> dict[str, complex]:
    acc = {"I" * n: 1 + 0j}
    for p, dag in modes:
        acc = multiply(acc, jordan_wigner(p, n, dag).as_dict())
    return acc


def excitation_terms(occupied: Sequence[int], virtual: Sequence[int], n: int) -> PauliTermList:
    """Real ``r_P`` with ``T - T^dag = i * sum_P r_P P`` for ``T = a_v^dag ... a_o ...``.

    Singles: ``T = a_a^dag a_i``. Doubles: ``T = a_a^dag a_b^dag a_j a_i``.
    """
    if len(occupied) != len(virtual) or len(occupied) not in (1, 2):
        raise ValueError("only single and double excitations are supported")
    for p in list(occupied) + list(virtual):
        if not 0 <= p < n:
            raise IndexOutOfRange(f"mode {p} outside 0..{n - 1}")
    modes = [(a, True) for a in virtual] + [(i, False) for i in reversed(occupied)]
    t = _op_product(modes, n)
    td = _op_product([(p, not d) for p, d in reversed(modes)], n)
    diff = dict(t)
    for w, c in td.items():
        diff[w] = diff.get(w, 0) - c
    out = PauliTermList()
    for w in sorted(diff):
        c = diff[w]
        if abs(c) < 1e-14:
            continue
        if abs(c.real) > 1e-12:
            raise ArithmeticError("anti-Hermitian combination left a real part")
        out.append((float(c.imag), w))
    return out


def excitations(n: int, electrons: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    occ = list(range(electrons))
    virt = list(range(electrons, n))
    singles = [((i,), (a,)) for i in occ for a in virt]
    doubles = [(ij, ab) for ij in itertools.combinations(occ, 2) for ab in itertools.combinations(virt, 2)]
    return singles + doubles


# -- circuits -----------------------------------------------------------------
def pauli_exponential(c: Circuit, word: str, theta) -> None:
    """exp(-i * theta / 2 * P) via basis change, cx ladder and rz."""
    n = len(word)
    support = [(n - 1 - k, ch) for k, ch in enumerate(word) if ch != "I"]
    support.sort()
    if not support:
        return
    qs = [q for q, _ in support]
    for q, ch in support:
        if ch == "X":
            c.h(q)
        elif ch == "Y":
            c.rx(math.pi / 2, q)
    for a, b in zip(qs, qs[1:]):
        c.cx(a, b)
    c.rz(theta, qs[-1])
    for a, b in reversed(list(zip(qs, qs[1:]))):
        c.cx(a, b)
    for q, ch in support:
        if ch == "X":
            c.h(q)
        elif ch == "Y":
            c.rx(-math.pi / 2, q)


def check(n: int) -> None:
    if n < 4 or n % 2:
        raise InvalidSize("VQE1", n, "needs an even number of qubits >= 4")


def ansatz_terms(n: int) -> list[tuple[int, float, str]]:
    """``(excitation index, r, word)`` for every Pauli word of the ansatz."""
    out = []
    for e, (occ, virt) in enumerate(excitations(n, n // 2)):
        for r, w in excitation_terms(occ, virt, n):
            out.append((e, r, w))
    return out


def ansatz(n: int) -> Circuit:
    """Symbolic ansatz with one parameter ``t<e>`` per excitation."""
    check(n)
    c = Circuit(n, n, name=f"vqe{n}")
    for q in range(n // 2):
        c.x(q)
    for e, r, w in ansatz_terms(n):
        # exp(t * i r P) = exp(-i theta/2 P) with theta = -2 r t
        pauli_exponential(c, w, Param(f"t{e}", -2 * r))
    measure_into(c, range(n))
    return c


def sample(n: int, rng: np.random.Generator) -> dict:
    check(n)
    count = len(excitations(n, n // 2))
    return {"theta": [float(v) for v in rng.uniform(-math.pi, math.pi, count)]}


def sample_parameters(n: int, rng: np.random.Generator) -> list[float]:
    return sample(n, rng)["theta"]


def _binding(inst: ProblemInstance) -> dict[str, float]:
    theta = inst.payload["theta"]
    if len(theta) != len(excitations(inst.n, inst.n // 2)):
        raise InvalidInstance("parameter vector length does not match the ansatz")
    return {f"t{e}": float(v) for e, v in enumerate(theta)}


def build(inst: ProblemInstance) -> Circuit:
    return bind_params(ansatz(inst.n), _binding(inst), strict=True)


def ideal(inst: ProblemInstance) -> Distribution:
    return ideal_probabilities(build(inst))


# -- term files -----------------------------------------------------------------
def parse_terms(text: str) -> PauliTermList:
    out = PauliTermList()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'coefficient word'")
        out.append((float(parts[0]), parts[1].upper()))
    return out.validate()


def load_terms(path: str | Path) -> PauliTermList:
    return parse_terms(Path(path).read_text())


def dump_terms(terms: Iterable[tuple[float, str]]) -> str:
    return "".join(f"{c!r} {w}\n" for c, w in terms)


def example_terms() -> PauliTermList:
    return parse_terms(resources.files("appbench.data").joinpath(EXAMPLE_TERMS).read_text())


def diagonal_energy(terms: PauliTermList, dist: Distribution) -> float:
    """Expectation of the I/Z-only terms under a computational-basis distribution."""
    n = terms.num_qubits
    total = 0.0
    for c, w in terms:
        if set(w) - {"I", "Z"}:
            continue
        zq = [n - 1 - k for k, ch in enumerate(w) if ch == "Z"]
        val = 0.0
        for outcome, p in dist.probs.items():
            parity = sum((outcome >> q) & 1 for q in zq) & 1
            val += p * (-1 if parity else 1)
        total += c * val
    return total
