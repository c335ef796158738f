import numpy as np
import pytest

from conftest import direct_eval, gl_mesh
from gamow.algebra import (
    BasisTag,
    DiagonalSymbol,
    KernelSymbol,
    KernelTerm,
    Observable,
    add,
    adjoint,
    hamiltonian_power,
    identity,
    is_self_adjoint,
    kernel_observable,
    multiply,
    retag,
    same_samples,
    scale,
    truncate_rank,
    zero,
)
from gamow.errors import BasisMismatch, UnsupportedDegree
from gamow.sampling import random_observable, random_wavepacket
from gamow.states import pair, pure_state
from gamow.zrep import PolySymbol, QuadratureConfig, conjugate, eval_at, wavepacket

E, W = gl_mesh(0.0, 50.0, panels=120, order=10)


def mesh_values(phi):
    # eval_at is checked against the plain exponential sum in test_zrep
    return eval_at(phi, E)


def inner_with_operator(phi, obs, psi):
    """<phi| O psi> on a dense mesh: diagonal and kernel parts evaluated separately."""
    f, g = mesh_values(phi), mesh_values(psi)
    val = np.sum(W * np.conj(f) * obs.diag(E) * g)
    for w, a, b in obs.kernel.terms:
        val += w * np.sum(W * np.conj(f) * mesh_values(a)) * np.sum(W * mesh_values(b) * g)
    return val


def inner_adjoint_first(phi, obs, psi):
    """<O^dagger phi | psi> with the adjoint applied to phi on the mesh."""
    dag = adjoint(obs)
    f, g = mesh_values(phi), mesh_values(psi)
    o_phi = dag.diag(E) * f
    for w, a, b in dag.kernel.terms:
        o_phi = o_phi + w * mesh_values(a) * np.sum(W * mesh_values(b) * f)
    return np.sum(W * np.conj(o_phi) * g)


@pytest.fixture
def probe(packet):
    return pure_state(packet, BasisTag.FREE)


def test_identity_pairs_to_one(probe):
    assert abs(pair(probe, identity()).value - 1) < 1e-6


def test_identity_is_unit(rng):
    o = random_observable(rng, "mixed")
    assert same_samples(multiply(identity(), o), o)
    assert same_samples(multiply(o, identity()), o)


def test_adjoint_of_identity():
    assert same_samples(adjoint(identity()), identity())


def test_hamiltonian_power_zero_is_identity():
    assert same_samples(hamiltonian_power(0), identity())


def test_hamiltonian_power_bounds():
    with pytest.raises(UnsupportedDegree):
        hamiltonian_power(9)
    with pytest.raises(UnsupportedDegree):
        hamiltonian_power(-1)


def test_h_times_h():
    assert same_samples(multiply(hamiltonian_power(1), hamiltonian_power(1)), hamiltonian_power(2))


def test_add_zero_and_scale_zero(rng, probe):
    o = random_observable(rng, "mixed")
    assert abs(pair(probe, add(o, zero())).value - pair(probe, o).value) == 0
    assert pair(probe, scale(0.0, o)).value == 0


def test_add_negation_pairs_to_zero(rng, probe):
    o = random_observable(rng, "mixed")
    assert abs(pair(probe, add(o, scale(-1.0, o))).value) < 1e-12


def test_operators_match_functions(rng, probe):
    a, b = random_observable(rng, "mixed"), random_observable(rng, "mixed")
    assert same_samples(a + b, add(a, b))
    assert same_samples(2j * a, scale(2j, a))
    assert same_samples(a * b, multiply(a, b))
    assert abs(pair(probe, a - a).value) < 1e-12
    assert abs(pair(probe, -a).value + pair(probe, a).value) < 1e-12


def test_gram_contraction_against_mesh():
    a, b = wavepacket(0.0, 6.0, 3.0), wavepacket(0.5, 5.0, 3.5, 0.5j)
    c, d = wavepacket(-1.0, 7.0, 4.0), wavepacket(1.0, 6.0, 2.5)
    prod = multiply(kernel_observable([(1.0, a, b)]), kernel_observable([(1.0, c, d)]))
    assert prod.kernel.rank == 1
    e, w = gl_mesh(0.0, 50.0, panels=250, order=12)
    gram = np.sum(w * direct_eval(b, e) * direct_eval(c, e))
    assert abs(prod.kernel.terms[0].weight - gram) <= 1e-6 * abs(gram)


def test_adjoint_involution(rng):
    o = random_observable(rng, "mixed")
    assert same_samples(adjoint(adjoint(o)), o)


def test_self_adjoint_examples(packet):
    assert is_self_adjoint(kernel_observable([(2.5, packet, conjugate(packet))]))
    assert not is_self_adjoint(kernel_observable([(1j, packet, conjugate(packet))]))
    for n in range(5):
        assert is_self_adjoint(hamiltonian_power(n))


def test_symmetrized_is_self_adjoint(rng):
    for _ in range(3):
        o = random_observable(rng, "mixed")
        assert is_self_adjoint(o + adjoint(o))


def test_adjoint_duality_against_mesh(rng):
    for _ in range(5):
        o = random_observable(rng, "mixed")
        phi, psi = random_wavepacket(rng), random_wavepacket(rng)
        lhs = inner_with_operator(phi, o, psi)
        rhs = inner_adjoint_first(phi, o, psi)
        assert abs(lhs - rhs) <= 1e-6 * max(abs(lhs), 1e-12)


def test_associativity_weak(rng, probe):
    cfg = QuadratureConfig()
    for _ in range(3):
        a, b, c = (random_observable(rng, "mixed") for _ in range(3))
        left = pair(probe, multiply(multiply(a, b, cfg), c, cfg)).value
        right = pair(probe, multiply(a, multiply(b, c, cfg), cfg)).value
        assert abs(left - right) <= 1e-6 * (1 + abs(left))


def test_anti_homomorphism_weak(rng, probe):
    for _ in range(3):
        a, b = random_observable(rng, "mixed"), random_observable(rng, "mixed")
        lhs = pair(probe, adjoint(multiply(a, b))).value
        rhs = pair(probe, multiply(adjoint(b), adjoint(a))).value
        assert abs(lhs - rhs) <= 1e-6 * (1 + abs(lhs))


def test_retag_commutes_with_operations(rng):
    a, b = random_observable(rng, "mixed"), random_observable(rng, "mixed")
    for tag in (BasisTag.IN, BasisTag.OUT):
        assert same_samples(retag(multiply(a, b), tag), multiply(retag(a, tag), retag(b, tag)))
        assert same_samples(retag(add(a, b), tag), add(retag(a, tag), retag(b, tag)))
        assert same_samples(retag(adjoint(a), tag), adjoint(retag(a, tag)))


def test_tag_mismatch_rejected(rng):
    a = random_observable(rng, "kernel", BasisTag.IN)
    b = random_observable(rng, "kernel", BasisTag.OUT)
    with pytest.raises(BasisMismatch):
        multiply(a, b)
    with pytest.raises(BasisMismatch):
        add(a, b)


def test_truncate_rank(packet):
    o = kernel_observable([(1.0, packet, packet), (1e-20, packet, packet)])
    assert truncate_rank(o).kernel.rank == 1


def test_kernel_symbol_evaluation(packet, packet2):
    k = KernelSymbol((KernelTerm(2.0, packet, packet2),))
    assert k(1.0, 3.0) == pytest.approx(2.0 * packet(1.0) * packet2(3.0))
    assert k.rank == 1


def test_diagonal_symbol_evaluation(packet):
    d = DiagonalSymbol(PolySymbol((1.0, 2.0)), packet)
    assert d(1.5) == pytest.approx(4.0 + packet(1.5))
    assert not d.is_zero and DiagonalSymbol().is_zero


def test_observable_defaults():
    o = Observable()
    assert o.tag is BasisTag.FREE and o.diag.is_zero and o.kernel.rank == 0
