"""Quantum volume: square Haar-random SU(4) circuits scored by heavy-output probability."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuit import Circuit
from .metrics import heavy_output_probability
from .seeding import mix
from .simulator import Distribution, NoiseModel, sample_noisy, statevector
from .transpile import transpile_standard

THRESHOLD = 2 / 3


def haar_su4(rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q / np.linalg.det(q) ** 0.25


def qv_circuit(n: int, rng: np.random.Generator) -> Circuit:
    """``n`` layers, each a random perfect matching of SU(4) blocks, then measure all."""
    if n < 2:
        raise ValueError("quantum volume circuits need n >= 2")
    c = Circuit(n, n, name=f"qv{n}")
    for _ in range(n):
        perm = rng.permutation(n)
        for i in range(n // 2):
            c.unitary(haar_su4(rng), (int(perm[2 * i]), int(perm[2 * i + 1])))
    return c.measure_all()


@dataclass
class QvRecord:
    n: int
    mean_hop: float
    stderr: float
    circuits: int
    passed: bool


@dataclass
class QvResult:
    qv: int
    records: list[QvRecord] = field(default_factory=list)
    noise: tuple[float, float] = (0.0, 0.0)
    circuits_per_n: int = 0
    shots: int = 0
    seed: int = 0
    stderr_method: str = "sample"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["noise"] = list(self.noise)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QvResult":
        recs = [QvRecord(**r) for r in d.get("records", [])]
        return cls(qv=d["qv"], records=recs, noise=tuple(d.get("noise", (0, 0))),
                   circuits_per_n=d.get("circuits_per_n", 0), shots=d.get("shots", 0), seed=d.get("seed", 0),
                   stderr_method=d.get("stderr_method", "sample"))


def ideal_distribution(circuit: Circuit) -> Distribution:
    probs = np.abs(statevector(circuit)) ** 2
    return Distribution.from_array(circuit.width, probs)


def hop_stderr(hops, method: str = "sample") -> float:
    """Standard error of the mean heavy-output probability.

    ``"sample"`` uses the spread of the per-circuit values; ``"binomial"``
    treats each circuit as one Bernoulli trial, ``sqrt(h(1-h)/count)``.
    """
    hops = np.asarray(hops, dtype=float)
    if method == "binomial":
        mean = float(hops.mean())
        return math.sqrt(max(mean * (1 - mean), 0.0) / hops.size)
    if method == "sample":
        return float(hops.std(ddof=1) / math.sqrt(hops.size)) if hops.size > 1 else float("inf")
    raise ValueError(f"unknown stderr method {method!r}")


def score_width(n: int, noise: NoiseModel | None, circuits: int, shots: int, seed: int,
                stderr_method: str = "sample") -> QvRecord:
    hops = []
    for i in range(circuits):
        rng = np.random.default_rng(mix(seed, "qv", n, i, 0))
        circ = qv_circuit(n, rng)
        ideal = ideal_distribution(circ)
        out, _ = sample_noisy(transpile_standard(circ), noise, shots, mix(seed, "qv-shots", n, i, 0))
        hops.append(heavy_output_probability(ideal, out))
    mean = float(np.mean(hops))
    err = hop_stderr(hops, stderr_method)
    return QvRecord(n=n, mean_hop=mean, stderr=err, circuits=circuits, passed=mean - 2 * err > THRESHOLD)


def measure_qv(noise: NoiseModel | None, n_max: int, circuits_per_n: int = 200, shots: int = 1000,
               seed: int = 0, stderr_method: str = "sample", progress=None) -> QvResult:
    """Sweep n = 2..n_max, stopping at the first width that fails.

    ``qv`` is ``2**n`` for the largest n in the unbroken run of passes from
    n = 2 (1 if n = 2 already fails).
    """
    if circuits_per_n < 50:
        raise ValueError("circuits_per_n must be at least 50")
    noise = noise or NoiseModel()
    result = QvResult(qv=1, noise=(noise.p1, noise.p2), circuits_per_n=circuits_per_n, shots=shots, seed=seed,
                      stderr_method=stderr_method)
    for n in range(2, n_max + 1):
        rec = score_width(n, noise, circuits_per_n, shots, seed, stderr_method)
        result.records.append(rec)
        if progress:
            progress(rec)
        if not rec.passed:
            break
        result.qv = 2 ** n
    return result
