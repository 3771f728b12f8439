"""GNS construction, the modular operator by two routes, and the commutant."""

import math

import numpy as np
import pytest

from kmslab import (
    BlockAlgebra,
    InnerFlow,
    Projection,
    center_dimension,
    commutant_gap,
    gibbs,
    gns,
    intertwining_unitary,
    kms_simplex,
    modular_data,
    random_element,
    random_hermitian,
    random_state,
    verify_commutant_theorem,
    verify_kms,
    verify_modular_flow,
)
from kmslab.kms import support_compression

RNG = np.random.default_rng(6021)


def _gibbs_setup(dims, beta, rng=RNG, scale=1.0):
    alg = BlockAlgebra(dims)
    flow = InnerFlow(alg, random_hermitian(alg, rng, scale=scale))
    psi = gibbs(flow, beta)
    return flow, psi, gns(alg, psi.functional)


def test_gns_inner_product_matches_state():
    alg = BlockAlgebra((2, 3))
    phi = random_state(alg, RNG)
    g = gns(alg, phi)
    for _ in range(10):
        a = random_element(alg, RNG)
        b = random_element(alg, RNG)
        lhs = g.inner(g.lambda_map(a), g.lambda_map(b))
        rhs = phi.value(b.adjoint() @ a)
        assert abs(lhs - rhs) < 1e-10


def test_gns_rep_is_homomorphism():
    alg = BlockAlgebra((3,))
    phi = random_state(alg, RNG)
    g = gns(alg, phi)
    a = random_element(alg, RNG)
    b = random_element(alg, RNG)
    assert np.linalg.norm(g.rep(a @ b) - g.rep(a) @ g.rep(b)) < 1e-10
    assert np.linalg.norm(g.rep(a.adjoint()) - g.rep(a).conj().T) < 1e-10


def test_gns_vector_is_cyclic():
    alg = BlockAlgebra((2, 2))
    phi = random_state(alg, RNG)
    g = gns(alg, phi)
    m = g.basis_matrix()
    assert np.linalg.matrix_rank(m) == alg.coord_dim


def test_gns_needs_faithful_state():
    alg = BlockAlgebra((2, 2))
    flow = InnerFlow(alg, random_hermitian(alg, RNG))
    vertex = kms_simplex(flow, 1.0).vertices[0]
    with pytest.raises(ValueError, match="compress"):
        gns(alg, vertex.functional)
    small, _ = support_compression(vertex)
    gns(small.algebra, small.functional)  # works after compression


def test_modular_operator_two_level_anchor():
    # h = diag(0, 1), beta = log 2: the Gibbs density has weights (2/3, 1/3)
    # and the modular spectrum is {1/2, 1, 1, 2}
    alg = BlockAlgebra((2,))
    flow = InnerFlow(alg, alg.element([np.diag([0.0, 1.0]).astype(complex)]))
    psi = gibbs(flow, math.log(2.0))
    g = gns(alg, psi.functional)
    md = modular_data(g)
    evs = np.sort(np.linalg.eigvalsh(md.delta))
    assert np.allclose(evs, [0.5, 1.0, 1.0, 2.0], atol=1e-12)


def test_modular_routes_agree():
    for trial, dims in enumerate([(2,), (3,), (2, 2)]):
        rng = np.random.default_rng(400 + trial)
        _, _, g = _gibbs_setup(dims, beta=1.2, rng=rng)
        pol = modular_data(g, method="polar")
        cf = modular_data(g, method="closed_form")
        assert np.linalg.norm(pol.delta - cf.delta) < 1e-9


def test_modular_fixed_point_and_inversion():
    _, _, g = _gibbs_setup((3,), beta=0.8)
    md = modular_data(g)
    om = g.cyclic_vector()
    assert np.linalg.norm(md.delta @ om - om) < 1e-10
    assert np.linalg.norm(md.apply_j(om) - om) < 1e-10
    # J is an antilinear involution and J Δ J = Δ^{-1}
    v = RNG.normal(size=om.shape) + 1j * RNG.normal(size=om.shape)
    assert np.linalg.norm(md.apply_j(md.apply_j(v)) - v) < 1e-10
    jdj = md.conjugate_operator(md.delta)
    assert np.linalg.norm(jdj - np.linalg.inv(md.delta)) < 1e-9


def test_delta_powers_compose():
    _, _, g = _gibbs_setup((2, 2), beta=1.0)
    md = modular_data(g)
    half = md.delta_power(0.5)
    assert np.linalg.norm(half @ half - md.delta) < 1e-10
    u = md.flow_unitary(0.7)
    assert np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])) < 1e-10


def test_modular_flow_is_the_rescaled_dynamics():
    for trial in range(4):
        rng = np.random.default_rng(500 + trial)
        flow, psi, _ = _gibbs_setup((3,), beta=1.5, rng=rng)
        rep = verify_modular_flow(flow, psi, tol=1e-9)
        assert rep.passed, f"flow residual {rep.max_residual:.2e}"


def test_modular_flow_on_mixtures():
    rng = np.random.default_rng(510)
    alg = BlockAlgebra((2, 2))
    flow = InnerFlow(alg, random_hermitian(alg, rng))
    beta = 0.9
    psi = kms_simplex(flow, beta).mix([0.6, 0.4])
    assert verify_kms(flow, psi, beta, tol=1e-9).passed
    assert verify_modular_flow(flow, psi, tol=1e-8).passed


def test_commutant_theorem_and_gap():
    for dims in [(2,), (2, 3)]:
        flow, psi, g = _gibbs_setup(dims, beta=1.1)
        md = modular_data(g)
        assert verify_commutant_theorem(g, md)
        dim_alg, dim_comm, gap = commutant_gap(g, md)
        assert dim_alg == dim_comm == flow.algebra.coord_dim
        assert gap < 1e-8


def test_center_dimension():
    for dims, expected in [((4,), 1), ((2, 3), 2), ((1, 1, 2), 3)]:
        alg = BlockAlgebra(dims)
        phi = random_state(alg, RNG)
        assert center_dimension(gns(alg, phi)) == expected


def test_intertwining_unitary():
    alg = BlockAlgebra((4,))
    d = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    p = Projection(alg.element([d]))
    # rotate slightly: same rank, nearby range
    th = 0.2
    r = np.eye(4, dtype=complex)
    r[1, 1] = r[2, 2] = math.cos(th)
    r[1, 2], r[2, 1] = -math.sin(th), math.sin(th)
    q = Projection(alg.element([r @ d @ r.conj().T]))
    u = intertwining_unitary(p, q)
    ub = u.blocks[0]
    assert np.linalg.norm(ub @ ub.conj().T - np.eye(4)) < 1e-10
    # the canonical intertwiner carries q onto p
    assert np.linalg.norm(ub @ q.element.blocks[0] @ ub.conj().T - p.element.blocks[0]) < 1e-10


def test_intertwining_needs_matching_ranks():
    alg = BlockAlgebra((3,))
    p = Projection(alg.element([np.diag([1.0, 0.0, 0.0]).astype(complex)]))
    q = Projection(alg.element([np.diag([1.0, 1.0, 0.0]).astype(complex)]))
    with pytest.raises(ValueError):
        intertwining_unitary(p, q)
