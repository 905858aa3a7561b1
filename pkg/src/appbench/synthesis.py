"""Exact synthesis of one- and two-qubit unitaries into rx/ry/rz/cx."""
from __future__ import annotations

import math

import numpy as np

from .circuit import Gate

PI = math.pi
UNITARY_TOL = 1e-10


class NotUnitary(ValueError):
    pass


class NumericalBreakdown(ArithmeticError):
    pass


def canonical_angle(theta: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    t = math.remainder(float(theta), 2 * PI)
    return PI if t <= -PI else t


def _require_unitary(u: np.ndarray, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise NotUnitary(f"expected a {dim}x{dim} matrix, got {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(dim))) > UNITARY_TOL:
        raise NotUnitary("matrix is not unitary within 1e-10")
    return u


# ---------------------------------------------------------------------------
# single qubit
# ---------------------------------------------------------------------------
def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return ``(alpha, phi, theta, lam)`` with ``u = e^{i alpha} Rz(phi) Ry(theta) Rz(lam)``."""
    u = _require_unitary(u, 2)
    det = np.linalg.det(u)
    alpha = float(np.angle(det)) / 2
    v = u * np.exp(-1j * alpha)
    theta = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    plus = 2 * float(np.angle(v[1, 1])) if abs(v[1, 1]) > 1e-14 else 0.0
    minus = 2 * float(np.angle(v[1, 0])) if abs(v[1, 0]) > 1e-14 else 0.0
    phi = (plus + minus) / 2
    lam = (plus - minus) / 2
    return alpha, phi, theta, lam


def decompose_1q(u: np.ndarray) -> tuple[float, float, float]:
    """Euler ZXZ angles ``(a, b, c)`` such that ``Rz(c) Rx(b) Rz(a)`` equals ``u`` up to phase.

    ``a`` is the first rotation applied.  Angles are reduced into (-pi, pi].
    """
    _, phi, theta, lam = zyz_angles(u)
    if abs(canonical_angle(theta)) < 1e-12:
        return (canonical_angle(phi + lam), 0.0, 0.0)
    # Ry(t) = Rz(pi/2) Rx(t) Rz(-pi/2)
    return (canonical_angle(lam - PI / 2), canonical_angle(theta), canonical_angle(phi + PI / 2))


def one_qubit_gates(u: np.ndarray, q: int) -> list[Gate]:
    a, b, c = decompose_1q(u)
    return [Gate(name, (q,), (ang,)) for name, ang in (("rz", a), ("rx", b), ("rz", c))]


# ---------------------------------------------------------------------------
# two qubit (KAK)
# ---------------------------------------------------------------------------
_MAGIC = np.array(
    [[1, 1j, 0, 0], [0, 0, 1j, 1], [0, 0, 1j, -1], [1, -1j, 0, 0]], dtype=complex
) / math.sqrt(2)
_MAGIC_DAG = _MAGIC.conj().T
_PX = np.array([[0, 1], [1, 0]], dtype=complex)
_PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PZ = np.array([[1, 0], [0, -1]], dtype=complex)
# sign patterns of XX, YY, ZZ in the magic basis (all diagonal there)
_SIGNS = np.array([np.real(np.diag(_MAGIC_DAG @ np.kron(p, p) @ _MAGIC)) for p in (_PX, _PY, _PZ)])
_MIX = (0.0, 0.61803398875, 1.2345678, 2.2360679775, 2.7182818)


def kron_factor(k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``k ~ kron(a1, a0)`` (a0 on the low qubit) into unitary factors."""
    r = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    uu, s, vh = np.linalg.svd(r)
    a1 = uu[:, 0].reshape(2, 2) * math.sqrt(s[0])
    a0 = vh[0].reshape(2, 2) * math.sqrt(s[0])
    # fix scale so each factor is unitary (product unchanged)
    n1 = math.sqrt(abs(np.linalg.det(a1)))
    return a1 / n1, a0 * n1


def is_local(u: np.ndarray, tol: float = 1e-12) -> bool:
    r = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    s = np.linalg.svd(r, compute_uv=False)
    return s[1] < tol * max(s[0], 1.0)


def kak(u: np.ndarray):
    """Cartan decomposition ``u ~ kron(a1, a0) . exp(i(a XX + b YY + c ZZ)) . kron(b1, b0)``.

    Returns ``((a1, a0), (a, b, c), (b1, b0))``.
    """
    u = _require_unitary(u, 4)
    u = u / np.linalg.det(u) ** 0.25
    up = _MAGIC_DAG @ u @ _MAGIC
    m = up.T @ up
    for x in _MIX:
        _, p = np.linalg.eigh(math.cos(x) * m.real + math.sin(x) * m.imag)
        d2 = p.T @ m @ p
        if np.max(np.abs(d2 - np.diag(np.diag(d2)))) < 1e-10:
            break
    else:
        raise NumericalBreakdown("could not diagonalize the symmetric unitary")
    if np.linalg.det(p) < 0:
        p[:, 0] = -p[:, 0]
    d = np.sqrt(np.diag(d2))
    o1 = up @ p @ np.diag(1 / d)
    if np.max(np.abs(o1.imag)) > 1e-8:
        raise NumericalBreakdown("left factor is not real orthogonal")
    o1 = o1.real
    if np.linalg.det(o1) < 0:
        d[0] = -d[0]
        o1[:, 0] = -o1[:, 0]
    k1 = _MAGIC @ o1 @ _MAGIC_DAG
    k2 = _MAGIC @ p.T @ _MAGIC_DAG
    phases = np.angle(d)
    a, b, c = (_SIGNS @ phases) / 4
    return kron_factor(k1), (float(a), float(b), float(c)), kron_factor(k2)


def canonical_gates(a: float, b: float, c: float, q0: int, q1: int) -> list[Gate]:
    """Exact 3-cx circuit for ``exp(i(a XX + b YY + c ZZ))`` on ``(q0, q1)``, up to phase."""
    seq = [
        ("rz", q1, -PI / 2),
        ("cx", (q1, q0), None),
        ("rz", q0, -2 * c - PI / 2),
        ("ry", q1, 2 * a + PI / 2),
        ("cx", (q0, q1), None),
        ("ry", q1, -2 * b - PI / 2),
        ("cx", (q1, q0), None),
        ("rz", q0, PI / 2),
    ]
    out = []
    for name, q, ang in seq:
        if name == "cx":
            out.append(Gate("cx", q))
        else:
            out.append(Gate(name, (q,), (canonical_angle(ang),)))
    return out


def decompose_2q(u: np.ndarray, q0: int = 0, q1: int = 1) -> list[Gate]:
    """Gate list over rz/rx/ry/cx equal to ``u`` (``q0`` low bit) up to global phase.

    Local unitaries use no cx; everything else uses exactly three.
    """
    u = _require_unitary(u, 4)
    if is_local(u):
        a1, a0 = kron_factor(u)
        return one_qubit_gates(a0, q0) + one_qubit_gates(a1, q1)
    (a1, a0), (a, b, c), (b1, b0) = kak(u)
    core = canonical_gates(a, b, c, q0, q1)
    # the template opens with rz on q1 and closes with rz on q0; fold both
    # into the neighbouring single-qubit factors
    first, last = core[0], core[-1]
    b1 = _rz_matrix(first.params[0]) @ b1
    a0 = a0 @ _rz_matrix(last.params[0])
    return one_qubit_gates(b0, q0) + one_qubit_gates(b1, q1) + core[1:-1] + one_qubit_gates(a0, q0) + one_qubit_gates(a1, q1)


def _rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
