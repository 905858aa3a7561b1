"""Deterministic seed derivation.

``derive_seed`` folds each input into a 64-bit state with the splitmix64
finalizer:

    z = (z + 0x9E3779B97F4A7C15) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    z =  z ^ (z >> 31)

Strings are first reduced to 64 bits with FNV-1a over their UTF-8 bytes.
The scheme is fixed; changing it changes every stored result.
"""
from __future__ import annotations

MASK = (1 << 64) - 1


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for b in text.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & MASK
    return h


def mix(*parts: int | str) -> int:
    z = 0
    for p in parts:
        v = fnv1a64(p) if isinstance(p, str) else int(p) & MASK
        z = splitmix64(z ^ v)
    return z


def derive_seed(master: int, benchmark_id: str, n: int, circuit_idx: int, param_idx: int) -> int:
    """64-bit seed for one (benchmark, size, circuit, parameter) cell of a run."""
    return mix(master, benchmark_id, n, circuit_idx, param_idx)
