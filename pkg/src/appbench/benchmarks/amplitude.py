"""Amplitude estimation and the two Monte Carlo sampling benchmarks.

All three run phase estimation on the Grover operator
``Q = -A S0 A^dag S_chi`` of a state preparation ``A`` whose last qubit
flags the good subspace. ``Q`` has eigenphases ``+-2*theta`` with
``a = sin(theta)**2``, so the counting register reads ``phi`` or ``1 - phi``
for ``phi = theta / pi``.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..circuit import Circuit
from ..metrics import pe_outcome_distribution
from ..simulator import Distribution
from ..transpile import controlled_circuit
from .common import InvalidInstance, InvalidSize, ProblemInstance, inverse_qft, measure_into


def grover_operator(prep: Circuit) -> Circuit:
    """``-A S0 A^dag S_chi`` for ``A = prep``; the highest qubit of ``prep`` is the flag."""
    m = prep.width
    obj = m - 1
    qs = list(range(m))
    q = Circuit(m, name="Q")
    q.z(obj)
    q.compose(prep.inverse())
    for k in qs:
        q.x(k)
    q.mcp(math.pi, qs)
    for k in qs:
        q.x(k)
    # global -1, kept explicit because Q is used controlled
    q.z(obj)
    q.x(obj)
    q.z(obj)
    q.x(obj)
    q.compose(prep)
    return q


def _shift(gates, offset: int):
    return [replace(g, qubits=tuple(x + offset for x in g.qubits)) for g in gates]


def estimation_circuit(prep: Circuit, k: int, name: str) -> Circuit:
    """k counting qubits (0..k-1) followed by the ``prep`` register."""
    m = prep.width
    width = k + m
    counting = list(range(k))
    c = Circuit(width, k, name=name)
    c.extend(_shift(prep, k))
    for q in counting:
        c.h(q)
    body = grover_operator(prep)
    shifted = Circuit(width)
    shifted.extend(_shift(body, k))
    for j, ctrl in enumerate(counting):
        cq = controlled_circuit(shifted, ctrl)
        for _ in range(2 ** (k - 1 - j)):
            c.compose(cq)
    inverse_qft(c, counting)
    measure_into(c, counting)
    return c


def eigenphase_mixture(k: int, a: float) -> Distribution:
    """Readout distribution for amplitude ``a``: equal mix of phases ``phi`` and ``1 - phi``."""
    phi = math.asin(math.sqrt(a)) / math.pi
    d1 = pe_outcome_distribution(k, phi).to_array()
    d2 = pe_outcome_distribution(k, 1 - phi).to_array()
    return Distribution.from_array(k, 0.5 * (d1 + d2))


# -- amplitude estimation -----------------------------------------------------
def check_ae(n: int) -> None:
    if n < 3:
        raise InvalidSize("AE", n, "needs at least 2 counting qubits plus the object qubit")


def ae_sample(n: int, rng: np.random.Generator) -> dict:
    k = n - 1
    return {"numerator": int(rng.integers(1, 2 ** (k - 1)))}


def _ae_numerator(inst: ProblemInstance) -> int:
    k = inst.n - 1
    m = inst.payload["numerator"]
    if not 0 < m < 2 ** (k - 1):
        raise InvalidInstance(f"amplitude numerator {m} out of range")
    return m


def ae_build(inst: ProblemInstance) -> Circuit:
    k = inst.n - 1
    m = _ae_numerator(inst)
    theta = math.pi * m / 2 ** k
    prep = Circuit(1, name="A")
    prep.ry(2 * theta, 0)
    return estimation_circuit(prep, k, f"ae{inst.n}")


def ae_fold(inst: ProblemInstance, dist: Distribution) -> Distribution:
    """Identify readouts ``b`` and ``2**k - b``; both encode the same amplitude."""
    k = inst.n - 1
    size = 2 ** k
    src = dist.counts if dist.is_empirical else dist.probs
    out: dict[int, float] = {}
    for b, v in src.items():
        f = min(b, (size - b) % size)
        out[f] = out.get(f, 0) + v
    return Distribution(k, counts=out) if dist.is_empirical else Distribution(k, probs=out)


def ae_ideal(inst: ProblemInstance) -> Distribution:
    return Distribution.delta(inst.n - 1, _ae_numerator(inst))


# -- Monte Carlo sampling -------------------------------------------------------
DATA_QUBITS = 2


def check_mc(name: str, n: int) -> None:
    if n < DATA_QUBITS + 3:
        raise InvalidSize(name, n, f"needs at least {DATA_QUBITS + 3} qubits")


def mc1_sample(n: int, rng: np.random.Generator) -> dict:
    size = 2 ** DATA_QUBITS
    p = rng.random(size) + 0.05
    p = p / p.sum()
    f = rng.uniform(0.05, 0.95, size)
    return {"p": [float(v) for v in p], "f": [float(v) for v in f]}


def mc2_sample(n: int, rng: np.random.Generator) -> dict:
    return {"distribution": "uniform", "function": "parity"}


def state_prep_angles(p) -> list[tuple[int, list[float]]]:
    """Binary-tree ry angles loading amplitudes ``sqrt(p)`` on ``log2(len(p))`` qubits.

    Returns ``(target, angles)`` pairs from the top qubit down; each target
    is controlled by every higher qubit, lowest of them as select bit 0.
    """
    p = np.asarray(p, dtype=float)
    d = int(round(math.log2(p.size)))
    if 2 ** d != p.size or np.any(p < 0):
        raise InvalidInstance("probability table must have non-negative power-of-two length")
    out = []
    for j in range(d - 1, -1, -1):
        hi = d - 1 - j  # number of higher qubits
        angles = []
        for x in range(2 ** hi):
            # x indexes qubits j+1..d-1; sum p over lower bits for bit_j = 0 / 1
            base = x << (j + 1)
            p0 = sum(p[base + low] for low in range(2 ** j))
            p1 = sum(p[base + (1 << j) + low] for low in range(2 ** j))
            angles.append(2 * math.atan2(math.sqrt(p1), math.sqrt(p0)) if p0 + p1 > 0 else 0.0)
        out.append((j, angles))
    return out


def _mc_prep(inst: ProblemInstance) -> tuple[Circuit, float]:
    d = DATA_QUBITS
    obj = d
    prep = Circuit(d + 1, name="A")
    if inst.benchmark == "MC2":
        for q in range(d):
            prep.h(q)
        for q in range(d):
            prep.cx(q, obj)
        return prep, 0.5
    p = np.asarray(inst.payload["p"], dtype=float)
    f = np.asarray(inst.payload["f"], dtype=float)
    if p.size != 2 ** d or f.size != 2 ** d or abs(p.sum() - 1) > 1e-9 or np.any((f < 0) | (f > 1)):
        raise InvalidInstance("MC1 tables must be a distribution and values in [0, 1]")
    for j, angles in state_prep_angles(p):
        controls = list(range(j + 1, d))
        if controls:
            prep.ucry(angles, controls, j)
        else:
            prep.ry(angles[0], j)
    prep.ucry([2 * math.asin(math.sqrt(v)) for v in f], list(range(d)), obj)
    return prep, float(np.dot(p, f))


def mc_build(inst: ProblemInstance) -> Circuit:
    check_mc(inst.benchmark, inst.n)
    prep, _ = _mc_prep(inst)
    return estimation_circuit(prep, inst.n - DATA_QUBITS - 1, f"{inst.benchmark.lower()}_{inst.n}")


def mc_ideal(inst: ProblemInstance) -> Distribution:
    _, a = _mc_prep(inst)
    return eigenphase_mixture(inst.n - DATA_QUBITS - 1, a)


def mc_expected_value(inst: ProblemInstance) -> float:
    return _mc_prep(inst)[1]
