"""Trotterized disordered Heisenberg chain."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..circuit import Circuit
from ..simulator import Distribution, ideal_probabilities
from .common import InvalidInstance, InvalidSize, ProblemInstance, measure_into

DEFAULT_STEPS = 5
DEFAULT_TIME = 1.0


@dataclass
class HamiltonianSpec:
    n: int
    h_x: list[float] = field(default_factory=list)
    h_z: list[float] = field(default_factory=list)
    J: float = 1.0
    w: float = 10.0
    trotter_steps: int = DEFAULT_STEPS
    total_time: float = DEFAULT_TIME

    def validate(self) -> None:
        if len(self.h_x) != self.n or len(self.h_z) != self.n:
            raise InvalidInstance("field lists must have one entry per site")
        if any(abs(v) >= 1 for v in list(self.h_x) + list(self.h_z)):
            raise InvalidInstance("disorder fields must lie in (-1, 1)")
        if self.trotter_steps < 1 or self.total_time < 0:
            raise InvalidInstance("need at least one Trotter step and non-negative time")

    def to_dict(self) -> dict:
        return asdict(self)


def check(n: int) -> None:
    if n < 2:
        raise InvalidSize("HAMSIM", n, "needs at least 2 sites")


def sample(n: int, rng: np.random.Generator, steps: int = DEFAULT_STEPS, time: float = DEFAULT_TIME) -> dict:
    hx = rng.uniform(-1, 1, n)
    hz = rng.uniform(-1, 1, n)
    spec = HamiltonianSpec(n, [float(v) for v in hx], [float(v) for v in hz], trotter_steps=steps, total_time=time)
    return {"hamiltonian_spec": spec.to_dict()}


def spec_of(inst: ProblemInstance) -> HamiltonianSpec:
    spec = HamiltonianSpec(**inst.payload["hamiltonian_spec"])
    if spec.n != inst.n:
        raise InvalidInstance("site count does not match instance size")
    spec.validate()
    return spec


def heisenberg_block(c: Circuit, tau_j: float, a: int, b: int) -> None:
    """exp(-i * tau_j * (XX + YY + ZZ)) on sites a, b."""
    c.can(-tau_j, -tau_j, -tau_j, a, b)


def build(inst: ProblemInstance) -> Circuit:
    spec = spec_of(inst)
    n = spec.n
    tau = spec.total_time / spec.trotter_steps
    c = Circuit(n, n, name=f"hamsim{n}")
    # Neel-like product state
    for q in range(1, n, 2):
        c.x(q)
    even = [(q, q + 1) for q in range(0, n - 1, 2)]
    odd = [(q, q + 1) for q in range(1, n - 1, 2)]
    if n == 2:
        # one bond: split it across both sublayers so every width has the same layer pattern
        sublayers = [([(0, 1)], 0.5), ([(0, 1)], 0.5)]
    else:
        sublayers = [(even, 1.0), (odd, 1.0)]
    # barriers fence each sublayer; without them ASAP scheduling lets the
    # asymmetric block template skew across the chain and depth creeps with n
    c.barrier()
    for _ in range(spec.trotter_steps):
        for q in range(n):
            c.rx(2 * tau * spec.w * spec.h_x[q], q)
            c.rz(2 * tau * spec.w * spec.h_z[q], q)
        c.barrier()
        for bonds, frac in sublayers:
            for a, b in bonds:
                heisenberg_block(c, frac * tau * spec.J, a, b)
            c.barrier()
    measure_into(c, range(n))
    return c


def ideal(inst: ProblemInstance) -> Distribution:
    return ideal_probabilities(build(inst))
