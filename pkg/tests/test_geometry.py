from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from roughvi.errors import GeometryError, ValidationError
from roughvi.geometry import (MINUS, PLUS, DomainSpec, InterfaceProfile, as_fraction,
                              build_cell_mesh, build_flat_mesh, build_plain_mesh,
                              build_rough_mesh, eval_profile, read_mesh_dump, write_mesh)


def signed_areas(mesh):
    p = mesh.nodes[mesh.triangles]
    e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def test_as_fraction_goes_through_repr():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("3/8") == Fraction(3, 8)
    assert as_fraction(2) == 2


def test_sine_profile_values_and_slopes():
    prof = InterfaceProfile.sine(0.5, 1.0)
    v, s = eval_profile(prof, np.array([0.0, 0.25, 0.5, 1.25]))
    np.testing.assert_allclose(v, [1.0, 1.5, 1.0, 1.5], atol=1e-14)
    np.testing.assert_allclose(s, [np.pi, 0.0, -np.pi, 0.0], atol=1e-12)
    assert prof.max_value == pytest.approx(1.5)
    assert prof.min_value == pytest.approx(0.5)


def test_sawtooth_profile_kinks_and_slopes():
    prof = InterfaceProfile.sawtooth(0.5, 1.0)
    v, s = eval_profile(prof, np.array([0.0, 0.25, 0.5, 0.1, 0.3]))
    np.testing.assert_allclose(v[:3], [0.5, 1.5, 0.5])
    np.testing.assert_allclose(s[3:], [4.0, -4.0])
    np.testing.assert_allclose(prof.kinks(), [0.0, 0.25, 0.5, 0.75])


def test_scalar_in_scalar_out():
    v, s = eval_profile(InterfaceProfile.sine(), 0.25)
    assert np.ndim(v) == 0 and np.ndim(s) == 0


def test_sampled_profile_validation():
    prof = InterfaceProfile.from_samples([0, 0.5, 1], [1.0, 2.0, 1.0])
    assert eval_profile(prof, 0.25)[0] == pytest.approx(1.5)
    with pytest.raises(ValidationError, match="sample 1"):
        InterfaceProfile.from_samples([0, 0.5, 1], [1.0, 0.0, 1.0])
    with pytest.raises(ValidationError):
        InterfaceProfile.from_samples([0, 0.5, 1], [1.0, 2.0, 1.5])
    with pytest.raises(ValidationError):
        InterfaceProfile.from_samples([0, 0.7, 0.5, 1], [1.0, 2.0, 2.0, 1.0])


def test_domain_periods():
    assert DomainSpec(L=1, ell=1, eps="1/8").periods == 8
    with pytest.raises(ValidationError):
        DomainSpec(L=1, ell=1, eps="2/5").periods


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]),
       st.sampled_from([8, 12, 16]), st.sampled_from([1, Fraction(3, 2), 2]))
def test_rough_mesh_areas_match_profile_mean(eps, nxp, k):
    """Trapezoid integration of a periodic sine is exact, so the areas are too."""
    d = DomainSpec(L=1, ell=1, eps=eps, k=k)
    mesh = build_rough_mesh(d, InterfaceProfile.sine(), nxp, 4)
    scale = d.amplitude_scale
    assert mesh.area_minus == pytest.approx(1.0 + scale, abs=1e-12)
    assert mesh.area_plus == pytest.approx(1.0 - scale, abs=1e-12)
    assert np.all(signed_areas(mesh) > 0)
    np.testing.assert_array_equal(mesh.nodes[mesh.pairs[:, 0]], mesh.nodes[mesh.pairs[:, 1]])


def test_rough_mesh_structure():
    d = DomainSpec(L=1, ell=1, eps="1/4")
    mesh = build_rough_mesh(d, InterfaceProfile.sine(), 8, 4)
    assert mesh.n_pairs == 33
    assert set(np.unique(mesh.tags)) == {PLUS, MINUS}
    x, y = mesh.nodes.T
    on_edge = np.isclose(x, 0) | np.isclose(x, 1) | np.isclose(y, -1) | np.isclose(y, 1)
    np.testing.assert_array_equal(mesh.boundary, on_edge)
    # plus nodes belong to plus triangles only
    plus_nodes = set(mesh.triangles[mesh.tags == PLUS].ravel())
    assert set(mesh.pairs[:, 0]) <= plus_nodes
    assert not set(mesh.pairs[:, 1]) & plus_nodes
    arc = mesh.interface_length
    assert 1.0 < arc < 2.31
    assert mesh.pair_weights().sum() == pytest.approx(arc)


def test_interface_length_converges_to_arc_length():
    d = DomainSpec(L=1, ell=1, eps="1/4")
    lengths = [build_rough_mesh(d, InterfaceProfile.sine(), n, 4).interface_length
               for n in (8, 16, 64)]
    assert lengths[0] < lengths[1] < lengths[2] < 2.30490


def test_rough_mesh_rejects_bad_geometry():
    with pytest.raises(GeometryError):
        build_rough_mesh(DomainSpec(L=1, ell=0.3, eps="1/4"), InterfaceProfile.sine(), 8, 4)
    with pytest.raises(GeometryError):
        build_rough_mesh(DomainSpec(L=1, ell=1, eps="1/4"), InterfaceProfile.sawtooth(), 10, 4)
    with pytest.raises(ValidationError):
        build_rough_mesh(DomainSpec(L=1, ell=1, eps="1/4"), InterfaceProfile.sine(), 4, 4)


def test_sawtooth_mesh_hits_kinks():
    d = DomainSpec(L=1, ell=1, eps="1/4")
    mesh = build_rough_mesh(d, InterfaceProfile.sawtooth(), 8, 4)
    heights = mesh.interface_heights()
    assert heights.max() == pytest.approx(0.25 * 1.5)
    assert heights.min() == pytest.approx(0.25 * 0.5)


def test_flat_mesh_smallest():
    mesh = build_flat_mesh(DomainSpec(L=1, ell=1), 2, 2)
    assert len(mesh.triangles) == 16
    assert mesh.n_pairs == 3
    assert mesh.area_plus == pytest.approx(1.0) and mesh.area_minus == pytest.approx(1.0)


def test_plain_mesh_has_no_pairs():
    mesh = build_plain_mesh(DomainSpec(L=1, ell=1), 4, 4)
    assert mesh.n_pairs == 0
    assert mesh.triangle_areas().sum() == pytest.approx(2.0)


def test_cell_mesh_small():
    cell = build_cell_mesh(4)
    assert cell.nodes.shape == (25, 2)
    assert len(cell.triangles) == 32
    assert len(cell.pairs_lr) == 4 and len(cell.pairs_bt) == 4
    assert cell.n_dofs == 16
    np.testing.assert_array_equal(cell.master[cell.pairs_lr[:, 0]], cell.master[cell.pairs_lr[:, 1]])
    assert cell.master[0] == cell.master[24]
    with pytest.raises(ValidationError):
        build_cell_mesh(3)


def test_mesh_dump_round_trip(tmp_path):
    mesh = build_rough_mesh(DomainSpec(L="1/4", ell=1, eps="1/4"), InterfaceProfile.sine(), 8, 4)
    write_mesh(mesh, tmp_path / "mesh.txt")
    nodes, tris, tags, pairs, px = read_mesh_dump(tmp_path / "mesh.txt")
    np.testing.assert_array_equal(nodes, mesh.nodes)
    np.testing.assert_array_equal(tris, mesh.triangles)
    np.testing.assert_array_equal(tags, mesh.tags)
    np.testing.assert_array_equal(pairs, mesh.pairs)
    np.testing.assert_array_equal(px, mesh.pair_x)
    head = (tmp_path / "mesh.txt").read_text().splitlines()[0]
    assert head == f"{mesh.n_nodes} {len(mesh.triangles)} {mesh.n_pairs}"
