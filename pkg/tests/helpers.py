"""Random circuit generators and small oracles shared by the tests."""
from __future__ import annotations

import math

import numpy as np

from appbench.circuit import Circuit
from appbench.qv import haar_su4

ONE_Q = ["id", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "sx"]
ONE_Q_PARAM = ["rx", "ry", "rz", "p"]


def haar_u2(rng):
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_gate(c: Circuit, rng: np.random.Generator, kinds=None) -> None:
    n = c.width
    options = ["1q", "1qp", "u"]
    if n >= 2:
        options += ["cx", "cz", "cp", "swap", "can", "su4"]
    if n >= 3:
        options += ["ccx", "mcx", "mcp", "mcu", "ucry"]
    if kinds is not None:
        options = [o for o in options if o in kinds]
    kind = options[rng.integers(len(options))]
    qs = [int(q) for q in rng.permutation(n)]
    ang = lambda: float(rng.uniform(-2 * math.pi, 2 * math.pi))
    if kind == "1q":
        c._g(ONE_Q[rng.integers(len(ONE_Q))], (qs[0],))
    elif kind == "1qp":
        c._g(ONE_Q_PARAM[rng.integers(4)], (qs[0],), (ang(),))
    elif kind == "u":
        c.unitary(haar_u2(rng), [qs[0]])
    elif kind == "cx":
        c.cx(qs[0], qs[1])
    elif kind == "cz":
        c.cz(qs[0], qs[1])
    elif kind == "cp":
        c.cp(ang(), qs[0], qs[1])
    elif kind == "swap":
        c.swap(qs[0], qs[1])
    elif kind == "can":
        c.can(ang(), ang(), ang(), qs[0], qs[1])
    elif kind == "su4":
        c.unitary(haar_su4(rng), qs[:2])
    elif kind == "ccx":
        c.ccx(qs[0], qs[1], qs[2])
    else:
        k = int(rng.integers(2, n))  # controls, at most 3 when n = 4
        ctrl, tgt = qs[:k], qs[k]
        if kind == "mcx":
            c.mcx(ctrl, tgt)
        elif kind == "mcp":
            c.mcp(ang(), qs[:k + 1])
        elif kind == "mcu":
            c.mcu(haar_u2(rng), ctrl, tgt)
        else:
            c.ucry([ang() for _ in range(2 ** k)], ctrl, tgt)


def random_circuit(rng: np.random.Generator, width: int | None = None, gates: int = 10, kinds=None) -> Circuit:
    n = int(width if width is not None else rng.integers(1, 5))
    c = Circuit(n, name="rand")
    for _ in range(gates):
        random_gate(c, rng, kinds)
    return c


def frozen_sampler_set(path) -> list[Circuit]:
    from appbench.circuit import loads

    text = open(path).read()
    chunks, cur = [], []
    for line in text.splitlines():
        if line.startswith("circuit ") and cur:
            chunks.append("\n".join(cur))
            cur = []
        cur.append(line)
    if cur:
        chunks.append("\n".join(cur))
    return [loads(ch) for ch in chunks if ch.strip() and not ch.lstrip().startswith("#")]
