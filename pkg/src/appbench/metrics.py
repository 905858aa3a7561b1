"""Result-quality metrics: classical and normalized fidelity, heavy outputs, phase-estimation outcomes."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .simulator import Distribution

DEGENERATE_TOL = 1e-12
EXACT_PHASE_TOL = 1e-12


class WidthMismatch(ValueError):
    pass


class DegenerateIdeal(ValueError):
    pass


class _Uniform:
    def __init__(self, num_bits: int):
        self.num_bits = num_bits
        self.p = 2.0 ** -num_bits

    def prob(self, outcome: int) -> float:
        return self.p


def _bhattacharyya(p: Distribution, q) -> float:
    if isinstance(q, _Uniform):
        keys = sorted(p.probs)
    else:
        keys = sorted(set(p.probs) & set(q.probs))
    return math.fsum(math.sqrt(p.prob(k) * q.prob(k)) for k in keys)


def classical_fidelity(p: Distribution, q: Distribution) -> float:
    """Squared Bhattacharyya coefficient ``(sum_x sqrt(p(x) q(x)))**2``."""
    if p.num_bits != q.num_bits:
        raise WidthMismatch(f"{p.num_bits} bits vs {q.num_bits} bits")
    if p.probs == q.probs:
        return 1.0
    return min(1.0, _bhattacharyya(p, q) ** 2)


@dataclass(frozen=True)
class FidelityReport:
    f_s: float
    f_uni: float
    f_normalized: float
    f_raw: float

    def to_dict(self) -> dict:
        return asdict(self)


def normalized_fidelity(ideal: Distribution, output: Distribution) -> FidelityReport:
    """Fidelity rescaled so the uniform distribution scores 0, clamped below at 0."""
    if ideal.num_bits != output.num_bits:
        raise WidthMismatch(f"{ideal.num_bits} bits vs {output.num_bits} bits")
    f_uni = _bhattacharyya(ideal, _Uniform(ideal.num_bits)) ** 2
    if f_uni > 1 - DEGENERATE_TOL:
        raise DegenerateIdeal("ideal distribution is indistinguishable from uniform")
    if isinstance(output, Distribution) and output.probs == ideal.probs:
        f_s = 1.0
    elif len(output.probs) == 2 ** output.num_bits and len(set(output.probs.values())) == 1:
        # an exactly uniform output reproduces f_uni term by term
        f_s = f_uni
    else:
        f_s = classical_fidelity(ideal, output)
    raw = (f_s - f_uni) / (1 - f_uni)
    return FidelityReport(f_s=f_s, f_uni=f_uni, f_normalized=max(raw, 0.0), f_raw=raw)


def heavy_set(ideal: Distribution) -> np.ndarray:
    """Outcomes whose ideal probability is strictly above the lower median."""
    probs = ideal.to_array()
    median = np.sort(probs)[(probs.size - 1) // 2]
    return np.flatnonzero(probs > median)


def heavy_output_probability(ideal: Distribution, output: Distribution) -> float:
    if ideal.num_bits != output.num_bits:
        raise WidthMismatch(f"{ideal.num_bits} bits vs {output.num_bits} bits")
    return math.fsum(output.prob(int(x)) for x in heavy_set(ideal))


def pe_outcome_distribution(t: int, phi: float) -> Distribution:
    """Probabilities of each t-bit phase-estimation readout for eigenphase ``phi``."""
    if t < 1:
        raise ValueError("t must be >= 1")
    size = 2 ** t
    phi = phi % 1.0
    scaled = size * phi
    nearest = round(scaled)
    if abs(scaled - nearest) <= EXACT_PHASE_TOL:
        return Distribution.delta(t, nearest % size)
    b = np.arange(size)
    num = 1 - np.exp(2j * np.pi * (scaled - b))
    den = 1 - np.exp(2j * np.pi * (phi - b / size))
    probs = np.abs(num / den / size) ** 2
    return Distribution.from_array(t, probs)
