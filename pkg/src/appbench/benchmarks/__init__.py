"""Benchmark registry: one sampler, generator and ideal-distribution oracle per family."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..circuit import Circuit
from ..simulator import Distribution
from . import amplitude, fourier, grover, hamsim, oracles, shor, vqe
from .common import InvalidInstance, InvalidSize, ProblemInstance


class BenchmarkId(str, enum.Enum):
    DJ = "DJ"
    BV1 = "BV1"
    BV2 = "BV2"
    HS = "HS"
    QFT1 = "QFT1"
    QFT2 = "QFT2"
    GROVER = "GROVER"
    PE = "PE"
    AE = "AE"
    HAMSIM = "HAMSIM"
    MC1 = "MC1"
    MC2 = "MC2"
    VQE1 = "VQE1"
    SHOR1 = "SHOR1"
    SHOR2 = "SHOR2"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Family:
    id: BenchmarkId
    group: str
    description: str
    check: Callable[[int], None]
    width: Callable[[int], int]
    sample: Callable[[int, np.random.Generator], dict]
    build: Callable[[ProblemInstance], Circuit]
    ideal: Callable[[ProblemInstance], Distribution]
    post: Callable[[ProblemInstance, Distribution], Distribution] | None = None
    parametric: bool = False

    def valid(self, n: int) -> bool:
        try:
            self.check(n)
        except InvalidSize:
            return False
        return True


def _f(bid, group, desc, check, width, sample, build, ideal, post=None, parametric=False):
    return Family(BenchmarkId(bid), group, desc, check, width, sample, build, ideal, post, parametric)


FAMILIES: dict[BenchmarkId, Family] = {f.id: f for f in [
    _f("DJ", "tutorial", "Deutsch-Jozsa, constant or balanced (parity) oracle",
       lambda n: oracles.check_data_bits("DJ", n), lambda n: n + 1,
       oracles.dj_sample, oracles.dj_build, oracles.dj_ideal),
    _f("BV1", "tutorial", "Bernstein-Vazirani, one ancilla per secret",
       lambda n: oracles.check_data_bits("BV1", n), lambda n: n + 1,
       oracles.bv_sample, oracles.bv1_build, oracles.bv_ideal),
    _f("BV2", "tutorial", "Bernstein-Vazirani on two qubits with mid-circuit measurement",
       lambda n: oracles.check_data_bits("BV2", n), lambda n: 2,
       oracles.bv_sample, oracles.bv2_build, oracles.bv_ideal),
    _f("HS", "tutorial", "Hidden Shift with inner-product bent functions",
       oracles.check_hs, lambda n: n,
       oracles.hs_sample, oracles.hs_build, oracles.hs_ideal),
    _f("QFT1", "subroutine", "QFT round trip adding one in Fourier space",
       lambda n: fourier.check_qft("QFT1", n), lambda n: n,
       fourier.qft_sample, fourier.qft1_build, fourier.qft1_ideal),
    _f("QFT2", "subroutine", "Inverse QFT of a one-qubit-prepared Fourier state",
       lambda n: fourier.check_qft("QFT2", n), lambda n: n,
       fourier.qft_sample, fourier.qft2_build, fourier.qft2_ideal),
    _f("GROVER", "subroutine", "Grover search for one marked string",
       grover.check, lambda n: n, grover.sample, grover.build, grover.ideal),
    _f("PE", "subroutine", "Phase estimation of an exactly representable phase",
       fourier.check_pe, lambda n: n, fourier.pe_sample, fourier.pe_build, fourier.pe_ideal),
    _f("AE", "subroutine", "Amplitude estimation of an exactly encodable amplitude",
       amplitude.check_ae, lambda n: n, amplitude.ae_sample, amplitude.ae_build, amplitude.ae_ideal,
       post=amplitude.ae_fold),
    _f("HAMSIM", "functional", "Trotterized disordered Heisenberg chain",
       hamsim.check, lambda n: n, hamsim.sample, hamsim.build, hamsim.ideal),
    _f("MC1", "functional", "Monte Carlo expectation, tabulated distribution and function",
       lambda n: amplitude.check_mc("MC1", n), lambda n: n,
       amplitude.mc1_sample, amplitude.mc_build, amplitude.mc_ideal),
    _f("MC2", "functional", "Monte Carlo expectation, uniform distribution and parity",
       lambda n: amplitude.check_mc("MC2", n), lambda n: n,
       amplitude.mc2_sample, amplitude.mc_build, amplitude.mc_ideal),
    _f("VQE1", "functional", "UCCSD ansatz measured in a fixed basis",
       vqe.check, lambda n: n, vqe.sample, vqe.build, vqe.ideal, parametric=True),
    _f("SHOR1", "functional", "Order finding, full counting register",
       lambda n: shor.check("SHOR1", n), lambda n: 4 * n + 2,
       shor.sample, shor.build_shor1, shor.ideal),
    _f("SHOR2", "functional", "Order finding, one recycled counting qubit",
       lambda n: shor.check("SHOR2", n), lambda n: 2 * n + 3,
       shor.sample, shor.build_shor2, shor.ideal),
]}


def family(benchmark) -> Family:
    try:
        return FAMILIES[BenchmarkId(str(benchmark).upper())]
    except ValueError:
        raise KeyError(f"unknown benchmark {benchmark!r}") from None


def valid_sizes(benchmark, lo: int, hi: int) -> list[int]:
    fam = family(benchmark)
    return [n for n in range(lo, hi + 1) if fam.valid(n)]


def width_of(benchmark, n: int) -> int:
    return family(benchmark).width(n)


def sample_instances(benchmark, n: int, count: int, rng: np.random.Generator) -> list[ProblemInstance]:
    fam = family(benchmark)
    fam.check(n)
    return [ProblemInstance(fam.id.value, n, fam.sample(n, rng)) for _ in range(count)]


def _family_of(inst: ProblemInstance) -> Family:
    fam = family(inst.benchmark)
    try:
        fam.check(inst.n)
    except InvalidSize as e:
        raise InvalidInstance(str(e)) from None
    return fam


def build_circuit(inst: ProblemInstance) -> Circuit:
    c = _family_of(inst).build(inst)
    c.tag = {"benchmark": inst.benchmark, "n": inst.n}
    return c


def ideal_distribution(inst: ProblemInstance) -> Distribution:
    return _family_of(inst).ideal(inst)


def postprocess(inst: ProblemInstance, dist: Distribution) -> Distribution:
    """Map raw readouts onto the space the ideal distribution lives in."""
    fam = _family_of(inst)
    return fam.post(inst, dist) if fam.post else dist


__all__ = [
    "BenchmarkId", "Family", "FAMILIES", "InvalidInstance", "InvalidSize", "ProblemInstance",
    "build_circuit", "family", "ideal_distribution", "postprocess", "sample_instances", "valid_sizes", "width_of",
]
