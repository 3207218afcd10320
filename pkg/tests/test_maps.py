import numpy as np
import pytest

from foldkin import (
    build_exact_sequence,
    build_surface,
    chain_structure,
    hinge_solution,
    hinge_to_spatial,
    hinge_to_truss,
    induced_map,
    pinned_chain_connecting_matrix,
    propagate_chain,
    serial_chain_operators,
    spatial_solution,
    spatial_to_truss,
    stiffen,
    transfer_matrix,
    truss_to_spatial,
)
from foldkin.errors import InvalidParams, NonRigidMotion, NotACycle
from foldkin.linalg import column_space, nullspace, subspace_residual, svd_rank
from foldkin.maps import hinge_embedding

from conftest import square_hole_grid, surface_of, two_panels

LEDGER_SURFACES = [
    ("two_panels", lambda: two_panels()),
    ("fan4", lambda: surface_of("single_vertex", 4, 0.5)),
    ("grid", lambda: surface_of("grid", 2, 3)),
    ("chain", lambda: surface_of("chain", 3)),
    ("ring", lambda: surface_of("annulus", 1, 8)),
    ("square_hole", lambda: square_hole_grid(3)),
    ("torus", lambda: surface_of("torus", 4, 4)),
    ("miura", lambda: surface_of("miura", 2, 2)),
]


@pytest.fixture(params=LEDGER_SURFACES, ids=[n for n, _ in LEDGER_SURFACES])
def any_surface(request):
    return request.param[1]()


# --- exact sequence level ---

def test_sequence_residuals_tiny(any_surface):
    seq = build_exact_sequence(any_surface)
    assert seq.report.max_residual < 1e-12
    assert seq.iota.naturality_residual() < 1e-12
    assert seq.pi.naturality_residual() < 1e-12


def test_exactness_at_spatial_classes(any_surface):
    # Image of the rigid classes equals the kernel of the connecting map.
    seq = build_exact_sequence(any_surface)
    pi_star = induced_map(seq.pi, 2, source_basis=seq.rigid_h2(),
                          target_basis=seq.spatial_h2())
    theta = seq.spatial_to_hinge_matrix()
    assert subspace_residual(column_space(pi_star, scale=1.0),
                             nullspace(theta, scale=1.0)) < 1e-8


def test_exactness_at_hinge_classes(any_surface):
    seq = build_exact_sequence(any_surface)
    theta = seq.spatial_to_hinge_matrix()
    iota_star = seq.loop_obstruction_matrix()
    assert subspace_residual(column_space(theta, scale=1.0),
                             nullspace(iota_star, scale=1.0)) < 1e-8


def test_dimension_ledgers(any_surface):
    seq = build_exact_sequence(any_surface)
    h2s = seq.spatial_h2().dim
    iota_star = seq.loop_obstruction_matrix()
    assert nullspace(iota_star, scale=1.0).shape[1] == h2s - 6
    assert truss_kernel_dim(any_surface) == h2s


def truss_kernel_dim(surface):
    from foldkin import truss_kernel

    return truss_kernel(stiffen(surface)).dim


def test_theta_rank(any_surface):
    seq = build_exact_sequence(any_surface)
    theta = seq.spatial_to_hinge_matrix()
    assert svd_rank(theta, scale=1.0) == seq.spatial_h2().dim - 6


def test_theta_annihilates_global_motions(rng):
    seq = build_exact_sequence(two_panels())
    theta = seq.spatial_to_hinge_matrix()
    for _ in range(20):
        vec = rng.normal(size=6)
        chain = np.concatenate([
            transfer_matrix(np.zeros(3), seq.surface.centroid((2, f))) @ vec
            for f in range(seq.surface.num_faces)])
        coords = seq.spatial_h2().project_coords(chain)
        # Global motions are cycles, so projection loses nothing.
        assert np.allclose(seq.spatial_h2().embed(coords), chain, atol=1e-9)
        assert np.abs(theta @ coords).max() < 1e-10


def test_theta_pseudoinverse_projectors(any_surface):
    from foldkin.linalg import pseudoinverse

    seq = build_exact_sequence(any_surface)
    theta = seq.spatial_to_hinge_matrix()
    pinv = pseudoinverse(theta)
    image = column_space(theta)
    assert np.abs(theta @ pinv @ image - image).max() < 1e-9
    kernel = nullspace(theta)
    expect = np.eye(theta.shape[1]) - kernel @ kernel.T
    assert np.abs(pinv @ theta - expect).max() < 1e-9


# --- hinge -> spatial ---

def test_hinge_to_spatial_round_trip_on_sheets(rng):
    for make in (lambda: surface_of("grid", 2, 2),
                 lambda: surface_of("single_vertex", 5, 0.4),
                 lambda: surface_of("chain", 4)):
        s = make()
        seq = build_exact_sequence(s)
        h1 = seq.hinge_h1()
        rates = h1.embed(rng.normal(size=h1.dim))
        report = hinge_to_spatial(seq, hinge_solution(seq, rates))
        assert not report.obstructed
        theta = seq.spatial_to_hinge_matrix()
        back = h1.embed(theta @ seq.spatial_h2().project_coords(
            report.spatial.coefficients))
        assert np.abs(back - rates).max() < 1e-9 * max(1, np.abs(rates).max())


def test_hinge_to_spatial_zero_maps_to_zero():
    seq = build_exact_sequence(two_panels())
    rates = np.zeros(len(seq.surface.interior_edges()))
    report = hinge_to_spatial(seq, hinge_solution(seq, rates))
    assert not report.obstructed
    assert np.abs(report.spatial.coefficients).max() == 0.0


def test_hinge_to_spatial_output_orthogonal_to_global(rng):
    seq = build_exact_sequence(surface_of("grid", 2, 2))
    h1 = seq.hinge_h1()
    rates = h1.embed(rng.normal(size=h1.dim))
    report = hinge_to_spatial(seq, hinge_solution(seq, rates))
    pi_star = induced_map(seq.pi, 2, source_basis=seq.rigid_h2(),
                          target_basis=seq.spatial_h2())
    coords = seq.spatial_h2().project_coords(report.spatial.coefficients)
    assert np.abs(pi_star.T @ coords).max() < 1e-9


def test_obstructed_cycle_rejected_on_ring(rng):
    s = surface_of("annulus", 1, 8)
    seq = build_exact_sequence(s)
    iota_star = seq.loop_obstruction_matrix()
    assert svd_rank(iota_star) > 0
    # A hinge class with nonzero loop obstruction: any row-space vector.
    row_space = column_space(iota_star.T)
    coords = row_space[:, 0]
    rates = seq.hinge_h1().embed(coords)
    report = hinge_to_spatial(seq, hinge_solution(seq, rates))
    assert report.obstructed
    assert report.obstruction.shape == (6,)
    assert np.linalg.norm(report.obstruction) > 1e-6
    assert report.spatial is None


def test_unobstructed_cycle_converts_on_ring(rng):
    s = surface_of("annulus", 1, 8)
    seq = build_exact_sequence(s)
    kernel = nullspace(seq.loop_obstruction_matrix(), scale=1.0)
    assert kernel.shape[1] > 0
    rates = seq.hinge_h1().embed(kernel @ rng.normal(size=kernel.shape[1]))
    report = hinge_to_spatial(seq, hinge_solution(seq, rates))
    assert not report.obstructed
    assert report.residuals["round_trip"] < 1e-9


def test_non_cycle_input_rejected(rng):
    s = surface_of("single_vertex", 4, 0.5)
    seq = build_exact_sequence(s)
    rates = rng.normal(size=4)
    rates += 1.0  # almost surely violates the vertex constraints
    sol = hinge_solution(seq, rates)
    if sol.residual > 1e-7 * np.abs(rates).max():
        with pytest.raises(NotACycle):
            hinge_to_spatial(seq, sol)


# --- spatial <-> truss ---

def test_translation_maps_to_uniform_vertex_velocity(rng):
    s = two_panels()
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    beta = rng.normal(size=3)
    values = np.concatenate([np.concatenate([np.zeros(3), beta])
                             for _ in range(s.num_faces)])
    sol = spatial_solution(seq, values)
    truss = spatial_to_truss(seq, linkage, sol)
    expect = np.tile(beta, linkage.num_points)
    assert np.abs(truss.coefficients - expect).max() < 1e-12
    assert truss.residual < 1e-12


def test_fold_mode_fixes_hinge_line(rng):
    # The two-panel fold about the shared edge leaves that edge's
    # endpoints stationary once the global part anchored there is gone.
    s = two_panels()
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    e = s.interior_edges()[0]
    u, v = s.edges[e]
    axis = s.edge_axis(e)
    anchor = s.centroid((1, e))
    # Rotation of panel g about the hinge line; panel f stays put.
    f, g = s.edge_faces[e]
    values = np.zeros(6 * s.num_faces)
    omega = axis
    values[6 * g:6 * g + 3] = omega
    values[6 * g + 3:6 * g + 6] = np.cross(omega, s.centroid((2, g)) - anchor)
    sol = spatial_solution(seq, values)
    assert sol.residual < 1e-12
    truss = spatial_to_truss(seq, linkage, sol)
    assert truss.residual < 1e-12
    for vertex in (u, v):
        assert np.abs(truss.coefficients[3 * vertex:3 * vertex + 3]).max() < 1e-12


def test_spatial_basis_maps_to_truss_kernel_basis(any_surface):
    from foldkin import truss_kernel

    seq = build_exact_sequence(any_surface)
    linkage = stiffen(any_surface)
    kernel = truss_kernel(linkage)
    basis = seq.spatial_h2()
    images = []
    for j in range(basis.dim):
        sol = spatial_solution(seq, basis.basis[:, j])
        out = spatial_to_truss(seq, linkage, sol)
        assert out.residual < 1e-9
        images.append(out.coefficients)
    image = np.column_stack(images)
    assert svd_rank(image) == kernel.dim == basis.dim


def test_truss_round_trip(rng, any_surface):
    seq = build_exact_sequence(any_surface)
    linkage = stiffen(any_surface)
    basis = seq.spatial_h2()
    values = basis.embed(rng.normal(size=basis.dim))
    sol = spatial_solution(seq, values)
    truss = spatial_to_truss(seq, linkage, sol)
    back = truss_to_spatial(seq, linkage, truss)
    scale = max(1.0, np.abs(values).max())
    assert np.abs(back.coefficients - values).max() < 1e-9 * scale


def test_truss_to_spatial_uniform_translation(rng):
    from foldkin import ModelSolution

    s = surface_of("grid", 2, 2)
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    beta = rng.normal(size=3)
    y = np.tile(beta, linkage.num_points)
    sol = truss_to_spatial(seq, linkage, ModelSolution("truss", y, 0.0))
    for f in range(s.num_faces):
        assert np.abs(sol.coefficients[6 * f:6 * f + 3]).max() < 1e-12
        assert np.allclose(sol.coefficients[6 * f + 3:6 * f + 6], beta)


def test_truss_to_spatial_rejects_warping(rng):
    from foldkin import ModelSolution

    s = two_panels()
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    y = np.zeros(3 * linkage.num_points)
    y[0] = 1.0  # move one vertex only: stretches its bars
    with pytest.raises((NonRigidMotion, NotACycle)):
        truss_to_spatial(seq, linkage, ModelSolution("truss", y, 0.0))


# --- full pipeline ---

def test_hinge_to_truss_pipeline_on_fan(rng):
    s = surface_of("single_vertex", 4, 0.5)
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    h1 = seq.hinge_h1()
    assert h1.dim == 1
    rates = h1.basis[:, 0]
    report = hinge_to_truss(seq, linkage, hinge_solution(seq, rates))
    assert not report.obstructed
    assert report.truss is not None
    assert np.abs(linkage.matrix @ report.truss.coefficients).max() < 1e-9


def test_hinge_to_truss_zero():
    s = surface_of("single_vertex", 4, 0.5)
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    rates = np.zeros(len(s.interior_edges()))
    report = hinge_to_truss(seq, linkage, hinge_solution(seq, rates))
    assert np.abs(report.truss.coefficients).max() == 0.0


def test_hinge_to_truss_obstructed_ring():
    s = surface_of("annulus", 1, 8)
    seq = build_exact_sequence(s)
    linkage = stiffen(s)
    iota_star = seq.loop_obstruction_matrix()
    coords = column_space(iota_star.T)[:, 0]
    rates = seq.hinge_h1().embed(coords)
    report = hinge_to_truss(seq, linkage, hinge_solution(seq, rates))
    assert report.obstructed
    assert report.truss is None


def test_pipeline_injective_on_obstruction_free_classes(rng, any_surface):
    seq = build_exact_sequence(any_surface)
    linkage = stiffen(any_surface)
    kernel = nullspace(seq.loop_obstruction_matrix(), scale=1.0)
    if kernel.shape[1] == 0:
        pytest.skip("no obstruction-free classes on this surface")
    images = []
    for j in range(kernel.shape[1]):
        rates = seq.hinge_h1().embed(kernel[:, j])
        report = hinge_to_truss(seq, linkage, hinge_solution(seq, rates))
        assert not report.obstructed
        images.append(report.truss.coefficients)
    gram = np.array(images) @ np.array(images).T
    eigs = np.linalg.eigvalsh(gram)
    assert eigs[0] > 1e-12 * eigs[-1]


def test_scaling_leaves_dimensions_unchanged():
    s = two_panels()
    reference = build_exact_sequence(s)
    dims = (reference.hinge_h1().dim, reference.spatial_h2().dim,
            reference.rigid_h1().dim, reference.rigid_h2().dim)
    for scale in (1e-3, 1e3):
        scaled = build_surface(s.vertices * scale, [list(c) for c in s.faces])
        seq = build_exact_sequence(scaled)
        assert (seq.hinge_h1().dim, seq.spatial_h2().dim,
                seq.rigid_h1().dim, seq.rigid_h2().dim) == dims


def test_model_dimensions_invariant_under_relabeling(rng):
    s = two_panels()
    reference = build_exact_sequence(s)
    dims = (reference.hinge_h1().dim, reference.spatial_h2().dim,
            reference.rigid_h1().dim)
    for _ in range(5):
        perm = rng.permutation(s.num_vertices)
        verts = np.empty_like(s.vertices)
        verts[perm] = s.vertices
        faces = [[int(perm[v]) for v in cycle] for cycle in s.faces]
        seq = build_exact_sequence(build_surface(verts, faces))
        assert (seq.hinge_h1().dim, seq.spatial_h2().dim,
                seq.rigid_h1().dim) == dims


# --- serial chains ---

def test_single_hinge_chain_operator():
    s = surface_of("chain", 1)
    ops = serial_chain_operators(s)
    chain = ops.chain
    e = chain.hinge_order[0]
    f = chain.face_order[1]
    expect = transfer_matrix(s.centroid((1, e)), s.centroid((2, f))) \
        @ hinge_embedding(s.edge_axis(e)).matrix
    assert ops.d.shape == (6, 1)
    assert np.abs(ops.d - expect).max() < 1e-13


def test_chain_recurrence_matches_operator(rng):
    for n in (2, 5):
        s = surface_of("chain", n, seed=11)
        ops = serial_chain_operators(s)
        rates = rng.normal(size=n)
        stepped = propagate_chain(ops, rates)
        direct = ops.d @ rates
        assert np.abs(stepped - direct).max() < 1e-12 * max(1, np.abs(direct).max())


def test_chain_inverse_identities():
    for n in (1, 4, 7):
        s = surface_of("chain", n, seed=23)
        ops = serial_chain_operators(s)
        n6 = 6 * n
        assert np.abs(ops.accumulate_inverse @ ops.accumulate
                      - np.eye(n6)).max() < 1e-12
        assert np.abs(ops.d_pinv @ ops.d - np.eye(n)).max() < 1e-11


def test_chain_left_inverse_is_connecting_map():
    for n, seed in ((1, 0), (3, 5), (5, 9)):
        s = surface_of("chain", n, seed=seed)
        ops = serial_chain_operators(s)
        theta, cycles = pinned_chain_connecting_matrix(s, ops)
        via_ops = ops.d_pinv @ cycles
        assert theta.shape == via_ops.shape == (n, n)
        assert np.abs(theta - via_ops).max() < 1e-9


def test_chain_structure_requires_path():
    with pytest.raises(InvalidParams):
        chain_structure(surface_of("grid", 2, 2))


def test_chain_solutions_live_in_hinge_space():
    s = surface_of("chain", 4)
    seq = build_exact_sequence(s)
    # No interior vertices: every rate vector is a valid hinge solution.
    assert seq.hinge_h1().dim == 4
