import math

import numpy as np
import pytest
from scipy.linalg import expm

from appbench import benchmarks as bm
from appbench.benchmarks import amplitude, grover, hamsim, shor, vqe
from appbench.benchmarks.common import InvalidInstance, InvalidSize, ProblemInstance
from appbench.circuit import Circuit, validate
from appbench.matrices import PAULIS, circuit_unitary, phase_distance
from appbench.metrics import pe_outcome_distribution
from appbench.simulator import ideal_probabilities
from appbench.transpile import transpile_standard

PAULI = dict(zip("IXYZ", PAULIS))


def pauli_matrix(word: str) -> np.ndarray:
    # leftmost character acts on the highest qubit, as in displayed bit strings
    m = np.array([[1.0 + 0j]])
    for ch in word:
        m = np.kron(m, PAULI[ch])
    return m


def fock_creation(p: int, n: int) -> np.ndarray:
    """a_p^dag on the occupation basis, sign from the modes below p."""
    dim = 2 ** n
    m = np.zeros((dim, dim), dtype=complex)
    for s in range(dim):
        if not (s >> p) & 1:
            sign = (-1) ** bin(s & ((1 << p) - 1)).count("1")
            m[s | (1 << p), s] = sign
    return m


def _inst(name, n, **payload):
    return ProblemInstance(name, n, payload)


# -- samplers ------------------------------------------------------------------
def test_bv1_sampler_reproducible():
    a = bm.sample_instances("BV1", 4, 3, np.random.default_rng(5))
    b = bm.sample_instances("BV1", 4, 3, np.random.default_rng(5))
    assert [i.payload for i in a] == [i.payload for i in b]
    assert all(0 <= i.payload["secret"] < 16 for i in a)


def test_hs_odd_width_rejected():
    with pytest.raises(InvalidSize):
        bm.sample_instances("HS", 3, 1, np.random.default_rng(0))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_shor1_small_instances(seed):
    (inst,) = bm.sample_instances("SHOR1", 2, 1, np.random.default_rng(seed))
    N, a, r = inst.payload["N"], inst.payload["a"], inst.payload["r"]
    assert 1 < N < 4 and 1 < a < N and math.gcd(a, N) == 1
    assert pow(a, r, N) == 1 and all(pow(a, k, N) != 1 for k in range(1, r))
    assert r > 1


def test_dj_alternates_both_kinds():
    kinds = [i.payload["kind"] for i in bm.sample_instances("DJ", 3, 40, np.random.default_rng(1))]
    assert 10 < kinds.count("balanced") < 30


def test_shor_moduli_are_semiprimes():
    def omega(v):
        count, d = 0, 2
        while v > 1:
            while v % d == 0:
                v //= d
                count += 1
            d += 1
        return count

    for n in range(4, 8):
        for N in shor.moduli(n):
            assert 2 ** (n - 1) <= N < 2 ** n
            assert omega(N) == 2


# -- generators against their ideal distributions ----------------------------------
SMALL = {
    "DJ": [2, 3, 5], "BV1": [2, 4], "BV2": [3, 5], "HS": [2, 4], "QFT1": [2, 4], "QFT2": [3, 5],
    "GROVER": [2, 3, 4], "PE": [2, 4], "AE": [3, 5], "HAMSIM": [2, 3], "MC1": [5, 6], "MC2": [5, 6],
    "VQE1": [4, 6], "SHOR2": [2],
}


@pytest.mark.parametrize("name,n", [(b, n) for b, ns in SMALL.items() for n in ns])
def test_transpiled_circuit_reproduces_ideal(name, n):
    for inst in bm.sample_instances(name, n, 2, np.random.default_rng(n)):
        c = bm.build_circuit(inst)
        assert validate(c) == []
        assert c.width == bm.width_of(name, n)
        got = bm.postprocess(inst, ideal_probabilities(transpile_standard(c)))
        assert got.total_variation(bm.ideal_distribution(inst)) < 1e-9


def test_bv1_secret_13_oracle():
    c = bm.build_circuit(_inst("BV1", 4, secret=13))
    assert c.width == 5
    assert sorted(g.qubits[0] for g in c if g.name == "cx" and g.qubits[1] == 4) == [0, 2, 3]


def test_qft1_increment_example():
    d = bm.ideal_distribution(_inst("QFT1", 4, x=13))
    assert d.probs == {14: 1.0}
    assert ideal_probabilities(bm.build_circuit(_inst("QFT1", 4, x=13))).probs == pytest.approx({14: 1.0})


def test_dj_constant_is_all_zero():
    assert bm.ideal_distribution(_inst("DJ", 4, kind="constant")).probs == {0: 1.0}
    assert bm.ideal_distribution(_inst("DJ", 4, kind="balanced")).probs == {15: 1.0}


def test_grover_three_qubit_analytic():
    assert grover.iterations(3) == 2
    p = grover.marked_probability(3)
    assert p == pytest.approx(math.sin(5 * math.asin(1 / math.sqrt(8))) ** 2)
    assert abs(p - 0.945) < 1e-3
    d = ideal_probabilities(bm.build_circuit(_inst("GROVER", 3, marked=5)))
    assert d.prob(5) == pytest.approx(p, abs=1e-12)


def test_mc2_three_counting_qubits():
    inst = _inst("MC2", 6, distribution="uniform", function="parity")
    ideal = bm.ideal_distribution(inst)
    assert ideal.probs == pytest.approx({2: 0.5, 6: 0.5})
    mix = {b: 0.5 * pe_outcome_distribution(3, 0.25).prob(b) + 0.5 * pe_outcome_distribution(3, 0.75).prob(b)
           for b in range(8)}
    assert ideal.total_variation(type(ideal)(3, probs=mix)) < 1e-12


def test_ae_fold_merges_mirror_readouts():
    inst = _inst("AE", 4, numerator=1)
    folded = amplitude.ae_fold(inst, type(bm.ideal_distribution(inst))(3, counts={1: 30, 7: 20, 0: 5}))
    assert folded.counts == {1: 50, 0: 5}


def test_invalid_instances():
    with pytest.raises(InvalidInstance):
        bm.build_circuit(_inst("BV1", 3, secret=8))
    with pytest.raises(InvalidInstance):
        bm.build_circuit(_inst("SHOR1", 4, N=15, a=5))
    with pytest.raises(InvalidInstance):
        bm.build_circuit(_inst("HS", 3, shift=1))


# -- Jordan-Wigner and Pauli exponentials ------------------------------------------------
def test_jordan_wigner_examples():
    assert list(vqe.jordan_wigner(0, 1)) == [(0.5, "X"), (-0.5j, "Y")]
    assert list(vqe.excitation_terms([0], [1], 2)) == [(0.5, "XY"), (-0.5, "YX")]
    with pytest.raises(vqe.IndexOutOfRange):
        vqe.jordan_wigner(3, 3)


@pytest.mark.parametrize("n", [3, 4])
def test_jordan_wigner_matches_fock_operators(n):
    for p in range(n):
        m = sum(c * pauli_matrix(w) for c, w in vqe.jordan_wigner(p, n))
        assert np.allclose(m, fock_creation(p, n))


@pytest.mark.parametrize("occ,virt", [([0], [2]), ([1], [3]), ([0, 1], [2, 3]), ([0, 2], [1, 3])])
def test_excitation_terms_match_fock_operators(occ, virt):
    n = 4
    a = {p: fock_creation(p, n) for p in range(n)}
    t = np.eye(2 ** n, dtype=complex)
    for v in virt:
        t = t @ a[v]
    for o in reversed(occ):
        t = t @ a[o].conj().T
    lhs = t - t.conj().T
    rhs = 1j * sum(r * pauli_matrix(w) for r, w in vqe.excitation_terms(occ, virt, n))
    assert np.allclose(lhs, rhs)


@pytest.mark.parametrize("word", ["ZZ", "XY", "YXZ", "ZIZ", "XXYY", "IYIX"])
def test_pauli_exponential_matches_expm(word):
    theta = 0.731
    c = Circuit(len(word))
    vqe.pauli_exponential(c, word, theta)
    assert phase_distance(circuit_unitary(c), expm(-0.5j * theta * pauli_matrix(word))) < 1e-12


def test_heisenberg_block_matches_expm():
    rng = np.random.default_rng(17)
    h = sum(pauli_matrix(p + p) for p in "XYZ")
    for tau in rng.uniform(-2, 2, 10):
        c = Circuit(2)
        hamsim.heisenberg_block(c, tau, 0, 1)
        target = expm(-1j * tau * h)
        assert phase_distance(circuit_unitary(c), target) < 1e-9
        assert phase_distance(circuit_unitary(transpile_standard(c)), target) < 1e-9


def test_term_file_roundtrip(tmp_path):
    text = "# demo\n-1.25 ZZII\n0.5 xxyy  # trailing comment\n\n0.125 IIIZ\n"
    terms = vqe.parse_terms(text)
    assert list(terms) == [(-1.25, "ZZII"), (0.5, "XXYY"), (0.125, "IIIZ")]
    p = tmp_path / "t.txt"
    p.write_text(vqe.dump_terms(terms))
    assert list(vqe.load_terms(p)) == list(terms)
    with pytest.raises(ValueError):
        vqe.parse_terms("1.0 ZZ\n2.0 ZZZ\n")
    with pytest.raises(ValueError):
        vqe.parse_terms("1.0 ZQ\n")
    with pytest.raises(ValueError):
        vqe.parse_terms("ZZ\n")


def test_example_terms_and_diagonal_energy():
    terms = vqe.example_terms()
    assert terms.num_qubits == 4 and len(terms) == 15
    dist = type(ideal_probabilities(Circuit(1, 1).measure(0, 0)))(4, probs={0b0011: 1.0})
    h = sum(c * pauli_matrix(w) for c, w in terms)
    assert vqe.diagonal_energy(terms, dist) == pytest.approx(np.real(np.diag(h))[0b0011].item())


def test_vqe_ansatz_is_parametric():
    c = vqe.ansatz(4)
    assert not c.is_bound
    assert len(vqe.excitations(4, 2)) == 5


# -- Hamiltonian simulation instance ----------------------------------------------
def test_hamsim_spec_validation():
    with pytest.raises(InvalidInstance):
        hamsim.HamiltonianSpec(2, [0.1], [0.2, 0.3]).validate()
    with pytest.raises(InvalidInstance):
        hamsim.HamiltonianSpec(2, [0.1, 1.5], [0.2, 0.3]).validate()


def test_hamsim_matches_trotter_product():
    (inst,) = bm.sample_instances("HAMSIM", 3, 1, np.random.default_rng(4))
    spec = hamsim.spec_of(inst)
    n, tau = 3, spec.total_time / spec.trotter_steps
    step = np.eye(8, dtype=complex)
    for q in range(n):
        for ch, field in (("X", spec.h_x[q]), ("Z", spec.h_z[q])):
            w = ["I"] * n
            w[n - 1 - q] = ch
            step = expm(-1j * tau * spec.w * field * pauli_matrix("".join(w))) @ step
    for a in (0, 1):
        hb = sum(pauli_matrix("".join(p if k in (n - 1 - a, n - 2 - a) else "I" for k in range(n))) for p in "XYZ")
        step = expm(-1j * tau * spec.J * hb) @ step
    psi = np.zeros(8, dtype=complex)
    psi[0b010] = 1
    for _ in range(spec.trotter_steps):
        psi = step @ psi
    ideal = bm.ideal_distribution(inst)
    assert np.allclose(ideal.to_array(), np.abs(psi) ** 2, atol=1e-10)
