import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roughvi.assembly import (InterfaceConductance, PeriodicCoefficient, PointLocator, Source,
                              apply_dirichlet, assemble_interface_coupling, assemble_load,
                              assemble_mass, assemble_problem, assemble_stiffness,
                              evaluate_cross_mesh, l2_difference, l2_norms, read_field,
                              write_field)
from roughvi.errors import AssemblyError, PointLookupError, ValidationError
from roughvi.geometry import (DomainSpec, InterfaceProfile, TwoComponentMesh, build_flat_mesh,
                              build_rough_mesh)


@pytest.fixture(scope="module")
def rough():
    d = DomainSpec(L=1, ell=1, eps="1/4", k=1, gamma=0)
    return d, build_rough_mesh(d, InterfaceProfile.sine(), 8, 4)


def test_stiffness_kernel_and_energy_of_linear_field(rough):
    _, mesh = rough
    K = assemble_stiffness(mesh, PeriodicCoefficient())
    np.testing.assert_allclose(K @ np.ones(mesh.n_nodes), 0.0, atol=1e-12)
    assert abs(K - K.T).max() < 1e-14
    x = mesh.nodes[:, 0]
    # |grad x|^2 = 1 over both components
    assert x @ (K @ x) == pytest.approx(2.0, rel=1e-12)
    K2 = assemble_stiffness(mesh, PeriodicCoefficient("constant", matrix=[[3, 0], [0, 1]]))
    assert x @ (K2 @ x) == pytest.approx(6.0, rel=1e-12)


def test_nonsymmetric_coefficient_gives_nonsymmetric_matrix(rough):
    _, mesh = rough
    skew = PeriodicCoefficient(
        "user-callable",
        func=lambda y: np.eye(2) + 0.3 * np.sin(2 * np.pi * y[..., 0])[..., None, None]
        * np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert not skew.is_symmetric
    K = assemble_stiffness(mesh, skew, eps=0.25)
    assert abs(K - K.T).max() > 1e-3
    assert not assemble_problem(mesh, skew, 1.0, Source(), 0.25).symmetric


def test_coupling_weights(rough):
    d, mesh = rough
    B = assemble_interface_coupling(mesh, InterfaceConductance(), d.eps, 0)
    jump = np.zeros(mesh.n_nodes)
    jump[mesh.pairs[:, 0]] = 1.0
    # a unit jump everywhere: the lumped integral is the polyline length
    assert jump @ (B @ jump) == pytest.approx(mesh.interface_length, rel=1e-12)
    B1 = assemble_interface_coupling(mesh, InterfaceConductance(), d.eps, 1)
    assert jump @ (B1 @ jump) == pytest.approx(0.25 * mesh.interface_length, rel=1e-12)
    np.testing.assert_allclose(B @ np.ones(mesh.n_nodes), 0.0, atol=1e-14)
    assert assemble_interface_coupling(mesh, 0.0, d.eps, 0).nnz == 0


def test_load_and_mass_integrate_constants(rough):
    _, mesh = rough
    assert assemble_load(mesh, Source("constant", 1.0)).sum() == pytest.approx(2.0)
    split = assemble_load(mesh, Source("split-sign", 1.0)).sum()
    assert split == pytest.approx(mesh.area_minus - mesh.area_plus, abs=1e-13)
    assert split == pytest.approx(0.5, abs=1e-12)
    flipped = assemble_load(mesh, Source("split-sign", 1.0, flip_x1=0.5)).sum()
    # exact value 0; edge midpoints on the flip line count as unflipped
    assert abs(flipped) < 1e-2
    assert assemble_load(mesh, Source("zero")).sum() == 0.0
    one = np.ones(mesh.n_nodes)
    assert one @ (assemble_mass(mesh) @ one) == pytest.approx(2.0)


def test_norms_of_simple_fields(rough):
    _, mesh = rough
    n = l2_norms(mesh, np.ones(mesh.n_nodes))
    assert n.l2 == pytest.approx(np.sqrt(2.0))
    assert n.grad == pytest.approx(0.0, abs=1e-6)
    assert n.jump == 0.0
    u = np.zeros(mesh.n_nodes)
    u[mesh.pairs[:, 0]] = 2.0
    assert l2_norms(mesh, u).jump == pytest.approx(2.0 * np.sqrt(mesh.interface_length))


def test_dirichlet_drops_pinned_pairs(rough):
    d, mesh = rough
    red = apply_dirichlet(assemble_problem(mesh, PeriodicCoefficient(), 1.0, Source(), d.eps))
    assert red.pairs.shape[0] == mesh.n_pairs - 2
    assert red.n == int((~mesh.boundary).sum())
    np.testing.assert_array_equal(red.pair_ids, np.arange(1, mesh.n_pairs - 1))


def test_degenerate_triangle_is_reported():
    d = DomainSpec(L=1, ell=1)
    mesh = build_flat_mesh(d, 2, 2)
    nodes = mesh.nodes.copy()
    a, b, c = mesh.triangles[5]
    nodes[c] = 0.5 * (nodes[a] + nodes[b])
    bad = TwoComponentMesh(nodes, mesh.triangles, mesh.tags, mesh.pairs, mesh.pair_x,
                           mesh.edge_lengths, mesh.boundary, mesh.L, mesh.ell, mesh.nx,
                           mesh.ny, mesh.kind)
    with pytest.raises(AssemblyError, match="5"):
        assemble_stiffness(bad, PeriodicCoefficient())


def test_data_validation():
    with pytest.raises(ValidationError):
        PeriodicCoefficient("layered", {"mean": 1.0, "amp": 1.5})
    with pytest.raises(ValidationError):
        PeriodicCoefficient("identity", alpha=2.0)
    with pytest.raises(ValidationError):
        PeriodicCoefficient("nonsense")
    with pytest.raises(ValidationError):
        InterfaceConductance("constant", 0.0)
    with pytest.raises(ValidationError):
        InterfaceConductance("sine-positive", 1.0, h0=0.9)
    assert InterfaceConductance("zero").h0 == 0.0
    assert PeriodicCoefficient("layered").alpha == pytest.approx(1.0, abs=2e-3)
    with pytest.raises(ValidationError):
        Source("sideways")


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-0.95, 0.95), st.floats(-2, 2), st.floats(-2, 2))
def test_locator_reproduces_linear_fields(x, y, a, b):
    d = DomainSpec(L=1, ell=1, eps="1/4")
    mesh = build_rough_mesh(d, InterfaceProfile.sine(), 8, 4)
    u = a * mesh.nodes[:, 0] + b * mesh.nodes[:, 1]
    val = evaluate_cross_mesh(mesh, u, [[x, y]])
    assert val[0] == pytest.approx(a * x + b * y, abs=1e-12)


def test_locator_prefers_plus_side_and_rejects_outside(rough):
    _, mesh = rough
    u = np.zeros(mesh.n_nodes)
    u[mesh.pairs[:, 0]] = 1.0
    loc = PointLocator(mesh)
    pts = mesh.nodes[mesh.pairs[3:6, 0]]
    np.testing.assert_allclose(evaluate_cross_mesh(mesh, u, pts, loc), 1.0)
    with pytest.raises(PointLookupError):
        loc.locate([[1.5, 0.0]])


def test_cross_mesh_difference(rough):
    _, mesh = rough
    flat = build_flat_mesh(DomainSpec(L=1, ell=1), 16, 4)
    lin = lambda m: 1.0 + 2.0 * m.nodes[:, 0] - m.nodes[:, 1]
    assert l2_difference(mesh, lin(mesh), flat, lin(flat)) == pytest.approx(0.0, abs=1e-12)
    shifted = lin(flat) + 0.5
    assert l2_difference(mesh, lin(mesh), flat, shifted) == pytest.approx(0.5 * np.sqrt(2.0))


def test_field_round_trip(tmp_path):
    v = np.random.default_rng(0).normal(size=50)
    write_field(v, tmp_path / "f.txt")
    np.testing.assert_array_equal(read_field(tmp_path / "f.txt"), v)
    (tmp_path / "g.txt").write_text("0 1.0\n2 2.0\n")
    with pytest.raises(ValidationError):
        read_field(tmp_path / "g.txt")
