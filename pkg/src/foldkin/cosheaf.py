"""Generic cellular cosheaf machinery.

A cosheaf assigns a vector-space stalk to every cell of a surface and a
linear extension map to every incidence, functorial under composition.
Extension maps assemble with incidence signs into boundary matrices; the
resulting chain complex has numerical homology computed by SVD.  A
cosheaf map is a stalk-wise family of matrices commuting with the
extension maps; short exact sequences of such maps carry a connecting
homomorphism between homology spaces, evaluated here by the usual
lift / boundary / restrict recipe.

Homology spaces are represented by harmonic bases: orthonormal bases of
``ker(boundary)`` intersected with the orthogonal complement of the
incoming image.  All matrices are dense; meshes of interest are small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ExactnessViolation,
    FunctorialityViolation,
    LiftFailure,
    NaturalityViolation,
    ShapeMismatch,
)
from .linalg import (
    DEFAULT_TOL,
    column_space,
    nullspace,
    pseudoinverse,
    subspace_residual,
    svd_rank,
)
from .surface import Cell, OrigamiSurface

FUNCTORIALITY_TOL = 1e-12
NATURALITY_TOL = 1e-12
COMPLEX_TOL = 1e-11


@dataclass
class Cosheaf:
    """Stalk dimensions per cell plus extension maps per incidence.

    ``extensions[(upper, lower)]`` has shape
    ``(stalk_dim[lower], stalk_dim[upper])``.  Cells absent from
    ``stalk_dims`` carry the zero stalk.
    """

    surface: OrigamiSurface
    stalk_dims: dict[Cell, int]
    extensions: dict[tuple[Cell, Cell], np.ndarray]

    def stalk_dim(self, cell: Cell) -> int:
        return self.stalk_dims.get(cell, 0)

    def extension(self, upper: Cell, lower: Cell) -> np.ndarray:
        ext = self.extensions.get((upper, lower))
        if ext is None:
            return np.zeros((self.stalk_dim(lower), self.stalk_dim(upper)))
        return ext

    def cells_of_dim(self, dim: int) -> list[Cell]:
        """Cells of one dimension with nonzero stalks, in index order."""
        counts = {0: self.surface.num_vertices,
                  1: self.surface.num_edges,
                  2: self.surface.num_faces}[dim]
        return [(dim, i) for i in range(counts) if self.stalk_dim((dim, i)) > 0]

    def chain_dim(self, dim: int) -> int:
        return sum(self.stalk_dim(c) for c in self.cells_of_dim(dim))

    def offsets(self, dim: int) -> dict[Cell, int]:
        out, pos = {}, 0
        for c in self.cells_of_dim(dim):
            out[c] = pos
            pos += self.stalk_dim(c)
        return out

    def functoriality_residual(self) -> float:
        """Worst mismatch of composed vs direct extension maps."""
        worst = 0.0
        for vc, ec, fc in self.surface.triples():
            if self.stalk_dim(fc) == 0:
                continue
            left = self.extension(ec, vc) @ self.extension(fc, ec)
            right = self.extension(fc, vc)
            if left.size:
                worst = max(worst, float(np.max(np.abs(left - right))))
        return worst


def constant_cosheaf(surface: OrigamiSurface, dim: int,
                     support: set[Cell] | None = None) -> Cosheaf:
    """Cosheaf with the same stalk ``R^dim`` on every cell and identity
    extensions.  ``support`` optionally restricts the nonzero stalks."""
    stalks: dict[Cell, int] = {}
    exts: dict[tuple[Cell, Cell], np.ndarray] = {}
    if dim > 0:
        cells = (
            [(0, v) for v in range(surface.num_vertices)]
            + [(1, e) for e in range(surface.num_edges)]
            + [(2, f) for f in range(surface.num_faces)]
        )
        for c in cells:
            if support is None or c in support:
                stalks[c] = dim
        eye = np.eye(dim)
        incidences = (
            list(surface.incidences_ev())
            + list(surface.incidences_fe())
            + list(surface.incidences_fv())
        )
        for upper, lower in incidences:
            if upper in stalks and lower in stalks:
                exts[(upper, lower)] = eye
    return Cosheaf(surface=surface, stalk_dims=stalks, extensions=exts)


@dataclass
class ChainComplex:
    """Assembled boundary matrices of a cosheaf.

    ``d1`` maps edge chains to vertex chains and ``d2`` maps face chains
    to edge chains; ``d1 @ d2`` vanishes to :data:`COMPLEX_TOL` relative.
    """

    cosheaf: Cosheaf
    d1: np.ndarray
    d2: np.ndarray
    cells: dict[int, list[Cell]]
    offsets: dict[int, dict[Cell, int]]

    def dim(self, degree: int) -> int:
        return sum(self.cosheaf.stalk_dim(c) for c in self.cells[degree])

    def boundary(self, degree: int) -> np.ndarray:
        if degree == 1:
            return self.d1
        if degree == 2:
            return self.d2
        return np.zeros((0, self.dim(0)))

    def cell_slice(self, cell: Cell) -> slice:
        start = self.offsets[cell[0]][cell]
        return slice(start, start + self.cosheaf.stalk_dim(cell))

    def square_residual(self) -> float:
        """Relative magnitude of ``d1 @ d2``."""
        if self.d1.size == 0 or self.d2.size == 0:
            return 0.0
        prod = self.d1 @ self.d2
        scale = max(np.max(np.abs(self.d1)), np.max(np.abs(self.d2)), 1.0)
        return float(np.max(np.abs(prod))) / scale


def assemble_chain_complex(cosheaf: Cosheaf) -> ChainComplex:
    """Assemble signed block boundary matrices from a cosheaf.

    Block ``(lower, upper)`` equals ``sign * extension(upper, lower)``
    where the sign is the surface incidence sign.  Raises
    :class:`FunctorialityViolation` when composed extensions disagree
    with the direct ones.
    """
    residual = cosheaf.functoriality_residual()
    if residual > FUNCTORIALITY_TOL:
        raise FunctorialityViolation(
            f"worst composition residual {residual:.3e}")

    surface = cosheaf.surface
    cells = {d: cosheaf.cells_of_dim(d) for d in (0, 1, 2)}
    offsets = {d: cosheaf.offsets(d) for d in (0, 1, 2)}

    def block_matrix(incidences, upper_deg):
        lower_deg = upper_deg - 1
        rows = sum(cosheaf.stalk_dim(c) for c in cells[lower_deg])
        cols = sum(cosheaf.stalk_dim(c) for c in cells[upper_deg])
        m = np.zeros((rows, cols))
        for upper, lower in incidences:
            du, dl = cosheaf.stalk_dim(upper), cosheaf.stalk_dim(lower)
            if du == 0 or dl == 0:
                continue
            r = offsets[lower_deg][lower]
            c = offsets[upper_deg][upper]
            sign = surface.incidence_sign(upper, lower)
            m[r:r + dl, c:c + du] += sign * cosheaf.extension(upper, lower)
        return m

    d1 = block_matrix(surface.incidences_ev(), 1)
    d2 = block_matrix(surface.incidences_fe(), 2)
    return ChainComplex(cosheaf=cosheaf, d1=d1, d2=d2, cells=cells, offsets=offsets)


@dataclass
class SubspaceBasis:
    """Orthonormal column basis of a subspace of a chain space."""

    ambient_dim: int
    basis: np.ndarray
    tol: float

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project_coords(self, chain: np.ndarray) -> np.ndarray:
        return self.basis.T @ chain

    def embed(self, coords: np.ndarray) -> np.ndarray:
        return self.basis @ coords


def homology_basis(cc: ChainComplex, degree: int,
                   tol: float = DEFAULT_TOL) -> SubspaceBasis:
    """Harmonic orthonormal basis of homology in one degree.

    The basis spans ``ker(boundary_degree)`` intersected with the
    orthogonal complement of ``im(boundary_{degree+1})``, which equals
    the joint kernel of the outgoing boundary map and the transpose of
    the incoming one; a single decomposition of the stacked operator
    yields it.  Degree 2 is simply the kernel of the face boundary map.
    """
    n = cc.dim(degree)
    if degree >= 2:
        return SubspaceBasis(ambient_dim=n, basis=nullspace(cc.d2, tol), tol=tol)
    if degree == 1:
        stacked = np.vstack([cc.d1, cc.d2.T])
    else:
        stacked = cc.d1.T
    return SubspaceBasis(ambient_dim=n, basis=nullspace(stacked, tol), tol=tol)


@dataclass
class CosheafMap:
    """Stalk-wise linear map between two cosheaves over one surface.

    Components must satisfy naturality: mapping then extending equals
    extending then mapping, on every incidence.  ``validate`` raises on
    shape problems; the naturality residual is available separately so
    callers can decide how strict to be.
    """

    source: Cosheaf
    target: Cosheaf
    components: dict[Cell, np.ndarray] = field(default_factory=dict)

    def component(self, cell: Cell) -> np.ndarray:
        comp = self.components.get(cell)
        if comp is None:
            return np.zeros((self.target.stalk_dim(cell),
                             self.source.stalk_dim(cell)))
        return comp

    def validate_shapes(self):
        for cell in set(self.source.stalk_dims) | set(self.target.stalk_dims) \
                | set(self.components):
            comp = self.component(cell)
            want = (self.target.stalk_dim(cell), self.source.stalk_dim(cell))
            if comp.shape != want:
                raise ShapeMismatch(
                    f"component at {cell} has shape {comp.shape}, wants {want}")

    def naturality_residual(self) -> float:
        self.validate_shapes()
        surface = self.source.surface
        incidences = (
            list(surface.incidences_ev())
            + list(surface.incidences_fe())
            + list(surface.incidences_fv())
        )
        worst = 0.0
        for upper, lower in incidences:
            left = self.component(lower) @ self.source.extension(upper, lower)
            right = self.target.extension(upper, lower) @ self.component(upper)
            if left.size:
                worst = max(worst, float(np.max(np.abs(left - right))))
        return worst

    def validate(self, tol: float = NATURALITY_TOL):
        residual = self.naturality_residual()
        if residual > tol:
            raise NaturalityViolation(f"naturality residual {residual:.3e}")
        return self

    def block_matrix(self, degree: int) -> np.ndarray:
        """Map between chain spaces in one degree (block diagonal)."""
        src = self.source.cells_of_dim(degree)
        tgt_off = self.target.offsets(degree)
        rows = self.target.chain_dim(degree)
        cols = self.source.chain_dim(degree)
        m = np.zeros((rows, cols))
        src_off = self.source.offsets(degree)
        for cell in src:
            comp = self.component(cell)
            if comp.size == 0:
                continue
            r = tgt_off.get(cell)
            if r is None:
                continue
            c = src_off[cell]
            m[r:r + comp.shape[0], c:c + comp.shape[1]] = comp
        return m

    def block_pseudoinverse(self, degree: int,
                            tol: float = DEFAULT_TOL) -> np.ndarray:
        """Pseudoinverse of :meth:`block_matrix`.

        The chain map is block diagonal, so the pseudoinverse is the
        assembly of per-cell pseudoinverses; this avoids decomposing one
        large dense matrix.
        """
        src_off = self.source.offsets(degree)
        tgt_off = self.target.offsets(degree)
        rows = self.source.chain_dim(degree)
        cols = self.target.chain_dim(degree)
        m = np.zeros((rows, cols))
        for cell in self.source.cells_of_dim(degree):
            comp = self.component(cell)
            if comp.size == 0 or cell not in tgt_off:
                continue
            inv = pseudoinverse(comp, tol)
            r = src_off[cell]
            c = tgt_off[cell]
            m[r:r + inv.shape[0], c:c + inv.shape[1]] = inv
        return m


def identity_map(cosheaf: Cosheaf) -> CosheafMap:
    comps = {c: np.eye(d) for c, d in cosheaf.stalk_dims.items() if d > 0}
    return CosheafMap(source=cosheaf, target=cosheaf, components=comps)


@dataclass
class CellExactness:
    cell: Cell
    injective: bool
    surjective: bool
    composition_residual: float
    image_kernel_residual: float

    @property
    def ok(self) -> bool:
        return self.injective and self.surjective


@dataclass
class ExactnessReport:
    entries: list[CellExactness]
    tol: float

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries) and self.max_residual <= self.tol

    @property
    def max_residual(self) -> float:
        if not self.entries:
            return 0.0
        return max(max(e.composition_residual, e.image_kernel_residual)
                   for e in self.entries)

    def worst_cell(self) -> CellExactness | None:
        bad = [e for e in self.entries
               if not e.ok or max(e.composition_residual,
                                  e.image_kernel_residual) > self.tol]
        if not bad:
            return None
        return max(bad, key=lambda e: max(e.composition_residual,
                                          e.image_kernel_residual))


def verify_exact_sequence(iota: CosheafMap, pi: CosheafMap,
                          tol: float = DEFAULT_TOL) -> ExactnessReport:
    """Check stalk-wise exactness of ``0 -> F -> G -> Q -> 0``.

    Per cell: the first map is injective, the second surjective, their
    composition vanishes, and the image of the first equals the kernel
    of the second (as subspaces, compared by projector distance).
    """
    if iota.target is not pi.source:
        raise ShapeMismatch("maps do not share the middle cosheaf")
    iota.validate_shapes()
    pi.validate_shapes()
    surface = iota.source.surface
    cells = (
        [(0, v) for v in range(surface.num_vertices)]
        + [(1, e) for e in range(surface.num_edges)]
        + [(2, f) for f in range(surface.num_faces)]
    )
    entries = []
    for cell in cells:
        a = iota.component(cell)
        b = pi.component(cell)
        df, dg, dq = a.shape[1], a.shape[0], b.shape[0]
        if df == 0 and dg == 0 and dq == 0:
            continue
        injective = svd_rank(a, tol) == df
        surjective = svd_rank(b, tol) == dq
        comp = b @ a
        comp_res = float(np.max(np.abs(comp))) if comp.size else 0.0
        image = column_space(a, tol)
        kernel = nullspace(b, tol)
        ik_res = subspace_residual(image, kernel)
        entries.append(CellExactness(cell, injective, surjective,
                                     comp_res, ik_res))
    return ExactnessReport(entries=entries, tol=tol)


def induced_map(phi: CosheafMap, degree: int,
                source_basis: SubspaceBasis | None = None,
                target_basis: SubspaceBasis | None = None,
                tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrix of the map induced on homology, in harmonic bases.

    Harmonic target bases are orthogonal to the incoming image, so the
    class of a mapped cycle is read off by plain projection.
    """
    if source_basis is None:
        source_basis = homology_basis(assemble_chain_complex(phi.source), degree, tol)
    if target_basis is None:
        target_basis = homology_basis(assemble_chain_complex(phi.target), degree, tol)
    block = phi.block_matrix(degree)
    return target_basis.basis.T @ block @ source_basis.basis


def connecting_map(iota: CosheafMap, pi: CosheafMap,
                   degree: int = 2,
                   tol: float = DEFAULT_TOL,
                   source_basis: SubspaceBasis | None = None,
                   target_basis: SubspaceBasis | None = None,
                   quotient_complex: ChainComplex | None = None,
                   middle_complex: ChainComplex | None = None,
                   lift_offsets: np.ndarray | None = None) -> np.ndarray:
    """Connecting homomorphism of a short exact sequence of cosheaves.

    For every basis cycle of the quotient homology in ``degree``:
    lift through ``pi`` by least squares, apply the middle boundary map,
    pull back through ``iota``, and project onto the harmonic basis of
    the sub-cosheaf homology one degree down.  The result does not
    depend on the choice of lift; ``lift_offsets`` (columns added to the
    lifts, one per basis cycle) exists to let tests exercise that.
    """
    if quotient_complex is None:
        quotient_complex = assemble_chain_complex(pi.target)
    if middle_complex is None:
        middle_complex = assemble_chain_complex(pi.source)
    if source_basis is None:
        source_basis = homology_basis(quotient_complex, degree, tol)
    if target_basis is None:
        target_basis = homology_basis(
            assemble_chain_complex(iota.source), degree - 1, tol)

    pi_block = pi.block_matrix(degree)
    iota_block = iota.block_matrix(degree - 1)
    pi_pinv = pi.block_pseudoinverse(degree, tol)
    iota_pinv = iota.block_pseudoinverse(degree - 1, tol)
    boundary = middle_complex.boundary(degree)

    out = np.zeros((target_basis.dim, source_basis.dim))
    for j in range(source_basis.dim):
        cycle = source_basis.basis[:, j]
        lift = pi_pinv @ cycle
        if lift_offsets is not None:
            lift = lift + lift_offsets[:, j]
        back = pi_block @ lift
        lift_gap = float(np.max(np.abs(back - cycle), initial=0.0))
        if lift_gap > tol * 1e3 * max(1.0, float(np.max(np.abs(cycle), initial=0.0))):
            raise LiftFailure(
                f"cycle {j} not in the image of the quotient map")
        dlift = boundary @ lift
        pulled = iota_pinv @ dlift
        residual = iota_block @ pulled - dlift
        scale = max(1.0, float(np.max(np.abs(dlift), initial=0.0)))
        if np.max(np.abs(residual), initial=0.0) > tol * 1e3 * scale:
            raise ExactnessViolation(
                f"boundary of lifted cycle {j} is not in the sub-cosheaf image")
        out[:, j] = target_basis.basis.T @ pulled
    return out
