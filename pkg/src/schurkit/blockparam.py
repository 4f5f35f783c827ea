"""Parametrizations of contractive 2x2 block operator matrices.

A block matrix

    T = [ D  C ]   maps  input (+) state-domain  ->  output (+) state-codomain
        [ B  A ]

is a contraction exactly when its blocks can be written through two
equivalent sets of contractive parameters: (K, M, X) anchored at the
lower-right block A, or (F, G, L) anchored at the upper-left block D.
Both directions are implemented here, together with the isometry and
co-isometry criteria expressed in the parameters, the identities linking
the two parametrizations of a unitary matrix, the block Moebius map
anchored at D, and the Shmul'yan fractional-linear transform of a single
contraction.

Parameter matrices are always expressed in the orthonormal defect bases
computed by :func:`defect_data`; ambient versions are obtained by
conjugating with those bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import NotContraction, NotUnitary, ShapeMismatch, SingularPencil
from .linalg import DEFAULT_TOL, Subspace, Tolerance, adj


@dataclass(frozen=True)
class BlockMatrix:
    """2x2 block matrix with explicit (possibly zero) space dimensions."""

    d: np.ndarray
    c: np.ndarray
    b: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        if self.d.shape[0] != self.c.shape[0] or self.b.shape[0] != self.a.shape[0]:
            raise ShapeMismatch("row blocks disagree")
        if self.d.shape[1] != self.b.shape[1] or self.c.shape[1] != self.a.shape[1]:
            raise ShapeMismatch("column blocks disagree")

    @property
    def in_dim(self) -> int:
        return self.d.shape[1]

    @property
    def out_dim(self) -> int:
        return self.d.shape[0]

    @property
    def state_in_dim(self) -> int:
        return self.a.shape[1]

    @property
    def state_out_dim(self) -> int:
        return self.a.shape[0]

    def assemble(self) -> np.ndarray:
        top = np.hstack([self.d, self.c])
        bottom = np.hstack([self.b, self.a])
        return np.vstack([top, bottom])

    def adjoint(self) -> "BlockMatrix":
        return BlockMatrix(adj(self.d), adj(self.b), adj(self.c), adj(self.a))


def block_matrix(d, c, b, a) -> BlockMatrix:
    return BlockMatrix(la.cmatrix(d), la.cmatrix(c), la.cmatrix(b), la.cmatrix(a))


def split_blocks(t: np.ndarray, out_dim: int, in_dim: int) -> BlockMatrix:
    """Cut a full matrix into blocks with the given upper-left shape."""
    t = la.cmatrix(t)
    return BlockMatrix(
        t[:out_dim, :in_dim], t[:out_dim, in_dim:], t[out_dim:, :in_dim], t[out_dim:, in_dim:]
    )


def defect_data(g: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Defect operators and defect-space bases of a contraction ``g``.

    Returns ``(D_g, D_g*, E, F)`` where E spans ran D_g in the domain and
    F spans ran D_g* in the codomain.
    """
    g = la.cmatrix(g)
    dd = la.defect_of(g, tol)
    dds = la.defect_of(g, tol, adjoint=True)
    return dd.op, dds.op, dd.space, dds.space


@dataclass(frozen=True)
class KMXParams:
    """Parameters anchored at the state block A.

    ``k`` maps the defect space of A into the output space, ``m`` maps the
    input space into the defect space of A*, and ``x`` couples the defect
    space of M to that of K*.  All three are contractions, expressed in the
    recorded orthonormal defect bases.
    """

    a: np.ndarray
    k: np.ndarray
    m: np.ndarray
    x: np.ndarray
    da_basis: Subspace
    dastar_basis: Subspace
    dm_basis: Subspace
    dkstar_basis: Subspace


@dataclass(frozen=True)
class FGLParams:
    """Parameters anchored at the feedthrough block D (mirror of KMX)."""

    d: np.ndarray
    f: np.ndarray
    g: np.ndarray
    l: np.ndarray
    dd_basis: Subspace
    ddstar_basis: Subspace
    dg_basis: Subspace
    dfstar_basis: Subspace


def _require_contraction(m: np.ndarray, name: str, tol: Tolerance):
    if not la.is_contraction(m, tol):
        raise NotContraction(f"{name} has norm {la.opnorm(m):.6f} > 1")


def kmx_params(a, k, m, x, tol: Tolerance = DEFAULT_TOL) -> KMXParams:
    """Validate raw (A, K, M, X) matrices and attach their defect bases."""
    a, k, m, x = map(la.cmatrix, (a, k, m, x))
    for mat, name in ((a, "A"), (k, "K"), (m, "M"), (x, "X")):
        _require_contraction(mat, name, tol)
    ua = la.defect_of(a, tol).space
    uas = la.defect_of(a, tol, adjoint=True).space
    if k.shape[1] != ua.dim:
        raise ShapeMismatch(f"K has {k.shape[1]} columns, defect space of A has dim {ua.dim}")
    if m.shape[0] != uas.dim:
        raise ShapeMismatch(f"M has {m.shape[0]} rows, defect space of A* has dim {uas.dim}")
    em = la.defect_of(m, tol).space
    fk = la.defect_of(k, tol, adjoint=True).space
    if x.shape != (fk.dim, em.dim):
        raise ShapeMismatch(f"X has shape {x.shape}, expected {(fk.dim, em.dim)}")
    return KMXParams(a, k, m, x, ua, uas, em, fk)


def assemble_kmx(p: KMXParams, tol: Tolerance = DEFAULT_TOL) -> BlockMatrix:
    """Build the contraction determined by (A, K, M, X)."""
    da = la.defect_of(p.a, tol).op
    dastar = la.defect_of(p.a, tol, adjoint=True).op
    ua, uas = p.da_basis.basis, p.dastar_basis.basis
    c = p.k @ (adj(ua) @ da)
    b = dastar @ (uas @ p.m)
    astar_restr = adj(ua) @ adj(p.a) @ uas
    dm = la.defect_of(p.m, tol).op
    dks = la.defect_of(p.k, tol, adjoint=True).op
    x_amb = p.dkstar_basis.basis @ p.x @ adj(p.dm_basis.basis)
    d = -p.k @ astar_restr @ p.m + dks @ x_amb @ dm
    t = BlockMatrix(d, c, b, p.a)
    _require_contraction(t.assemble(), "assembled block matrix", tol)
    return t


def decompose_kmx(t: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> KMXParams:
    """Recover (K, M, X) from a contraction; pseudo-inverses implement the
    restriction to the defect spaces."""
    _require_contraction(t.assemble(), "block matrix", tol)
    a = t.a
    da = la.defect_of(a, tol)
    dastar = la.defect_of(a, tol, adjoint=True)
    ua, uas = da.space, dastar.space
    k = t.c @ da.op_pinv @ ua.basis
    m = adj(uas.basis) @ dastar.op_pinv @ t.b
    resid = t.d + k @ (adj(ua.basis) @ adj(a) @ uas.basis) @ m
    dm = la.defect_of(m, tol)
    dks = la.defect_of(k, tol, adjoint=True)
    em, fk = dm.space, dks.space
    x = adj(fk.basis) @ dks.op_pinv @ resid @ dm.op_pinv @ em.basis
    x_amb = fk.basis @ x @ adj(em.basis)
    if la.matnorm_diff(dks.op @ x_amb @ dm.op, resid) > tol.eq_abs:
        raise NotContraction("no contractive X reproduces the feedthrough block")
    return KMXParams(a, k, m, x, ua, uas, em, fk)


def fgl_params(d, f, g, l, tol: Tolerance = DEFAULT_TOL) -> FGLParams:
    """Validate raw (D, F, G, L) matrices and attach their defect bases."""
    d, f, g, l = map(la.cmatrix, (d, f, g, l))
    for mat, name in ((d, "D"), (f, "F"), (g, "G"), (l, "L")):
        _require_contraction(mat, name, tol)
    ed = la.defect_of(d, tol).space
    fds = la.defect_of(d, tol, adjoint=True).space
    if f.shape[1] != ed.dim:
        raise ShapeMismatch(f"F has {f.shape[1]} columns, defect space of D has dim {ed.dim}")
    if g.shape[0] != fds.dim:
        raise ShapeMismatch(f"G has {g.shape[0]} rows, defect space of D* has dim {fds.dim}")
    eg = la.defect_of(g, tol).space
    ffs = la.defect_of(f, tol, adjoint=True).space
    if l.shape != (ffs.dim, eg.dim):
        raise ShapeMismatch(f"L has shape {l.shape}, expected {(ffs.dim, eg.dim)}")
    return FGLParams(d, f, g, l, ed, fds, eg, ffs)


def assemble_fgl(p: FGLParams, tol: Tolerance = DEFAULT_TOL) -> BlockMatrix:
    """Build the contraction determined by (D, F, G, L)."""
    dd = la.defect_of(p.d, tol).op
    dds = la.defect_of(p.d, tol, adjoint=True).op
    ed, fds = p.dd_basis.basis, p.ddstar_basis.basis
    b = p.f @ (adj(ed) @ dd)
    c = dds @ (fds @ p.g)
    dstar_restr = adj(ed) @ adj(p.d) @ fds
    dg = la.defect_of(p.g, tol).op
    dfs = la.defect_of(p.f, tol, adjoint=True).op
    l_amb = p.dfstar_basis.basis @ p.l @ adj(p.dg_basis.basis)
    a = -p.f @ dstar_restr @ p.g + dfs @ l_amb @ dg
    t = BlockMatrix(p.d, c, b, a)
    _require_contraction(t.assemble(), "assembled block matrix", tol)
    return t


def decompose_fgl(t: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> FGLParams:
    """Recover (F, G, L) from a contraction."""
    _require_contraction(t.assemble(), "block matrix", tol)
    d = t.d
    dd = la.defect_of(d, tol)
    dds = la.defect_of(d, tol, adjoint=True)
    ed, fds = dd.space, dds.space
    f = t.b @ dd.op_pinv @ ed.basis
    g = adj(fds.basis) @ dds.op_pinv @ t.c
    resid = t.a + f @ (adj(ed.basis) @ adj(d) @ fds.basis) @ g
    dg = la.defect_of(g, tol)
    dfs = la.defect_of(f, tol, adjoint=True)
    eg, ffs = dg.space, dfs.space
    l = adj(ffs.basis) @ dfs.op_pinv @ resid @ dg.op_pinv @ eg.basis
    l_amb = ffs.basis @ l @ adj(eg.basis)
    if la.matnorm_diff(dfs.op @ l_amb @ dg.op, resid) > tol.eq_abs:
        raise NotContraction("no contractive L reproduces the state block")
    return FGLParams(d, f, g, l, ed, fds, eg, ffs)


@dataclass(frozen=True)
class IsoFlags:
    """Isometry classification with the raw parameter-product residuals."""

    isometric: bool
    coisometric: bool
    unitary: bool
    residuals: dict


def iso_criteria(t: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> IsoFlags:
    """Classify T through the parameter products and cross-check directly.

    T is isometric iff D_K D_A = 0 and D_X D_M = 0; co-isometric iff
    D_M* D_A* = 0 and D_X* D_K* = 0.  The direct Gram tests must agree
    with the products; disagreement signals inconsistent rank decisions.
    """
    p = decompose_kmx(t, tol)
    da = la.defect_of(p.a, tol).op
    dastar = la.defect_of(p.a, tol, adjoint=True).op
    dk = la.defect_of(p.k, tol).op
    dm = la.defect_of(p.m, tol).op
    dmstar = la.defect_of(p.m, tol, adjoint=True).op
    dks = la.defect_of(p.k, tol, adjoint=True).op
    dx = la.defect_of(p.x, tol).op
    dxstar = la.defect_of(p.x, tol, adjoint=True).op
    residuals = {
        "dk_da": la.opnorm(dk @ (adj(p.da_basis.basis) @ da)),
        "dx_dm": la.opnorm(dx @ (adj(p.dm_basis.basis) @ dm)),
        "dmstar_dastar": la.opnorm(dmstar @ (adj(p.dastar_basis.basis) @ dastar)),
        "dxstar_dkstar": la.opnorm(dxstar @ (adj(p.dkstar_basis.basis) @ dks)),
    }
    iso = residuals["dk_da"] <= tol.eq_abs and residuals["dx_dm"] <= tol.eq_abs
    coiso = (
        residuals["dmstar_dastar"] <= tol.eq_abs and residuals["dxstar_dkstar"] <= tol.eq_abs
    )
    full = t.assemble()
    direct_iso = la.is_isometry(full, tol)
    direct_coiso = la.is_coisometry(full, tol)
    if iso != direct_iso or coiso != direct_coiso:
        from .errors import RankInconsistency

        raise RankInconsistency(
            f"parameter criteria {(iso, coiso)} disagree with Gram tests "
            f"{(direct_iso, direct_coiso)}"
        )
    return IsoFlags(iso, coiso, iso and coiso, residuals)


def unitary_link(t: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Residuals of the identities tying the two parametrizations of a
    unitary block matrix.

    Returned keys: defect space of D versus ran M*, defect space of D*
    versus ran K, F* versus M* compressed to the defect space of A*, G
    versus K compressed to the defect space of A, and L versus the
    restriction of A to ker D_A.  The convention L = A* restricted to
    ker D_A* is reached by calling this on ``t.adjoint()``.
    """
    full = t.assemble()
    if not la.is_unitary(full, tol):
        raise NotUnitary("unitary_link requires a unitary block matrix")
    kmx = decompose_kmx(t, tol)
    fgl = decompose_fgl(t, tol)
    m_amb = kmx.dastar_basis.basis @ kmx.m
    k_amb = kmx.k @ adj(kmx.da_basis.basis)
    dd_space = fgl.dd_basis
    dds_space = fgl.ddstar_basis
    ran_mstar = la.range_basis(adj(m_amb), tol)
    ran_k = la.range_basis(k_amb, tol)
    f_amb = fgl.f @ adj(fgl.dd_basis.basis)
    g_amb = fgl.ddstar_basis.basis @ fgl.g
    l_amb = fgl.dfstar_basis.basis @ fgl.l @ adj(fgl.dg_basis.basis)
    p_ker = la.defect_of(t.a, tol).kernel.projector()
    return {
        "dd_vs_ran_mstar": la.matnorm_diff(dd_space.projector(), ran_mstar.projector()),
        "ddstar_vs_ran_k": la.matnorm_diff(dds_space.projector(), ran_k.projector()),
        "fstar_vs_mstar": la.matnorm_diff(adj(f_amb), adj(m_amb)),
        "g_vs_k": la.matnorm_diff(g_amb, k_amb),
        "l_vs_a_on_ker": la.matnorm_diff(l_amb, t.a @ p_ker),
    }


def moebius_map(d: np.ndarray, q: BlockMatrix, tol: Tolerance = DEFAULT_TOL) -> BlockMatrix:
    """Block Moebius transform anchored at the contraction ``d``.

    ``q`` must have a vanishing upper-left block and act between the defect
    spaces of d: input = defect of D (+) state, output = defect of D* (+)
    state-codomain.  The result has blocks
    [D, D_D* G; F D_D, S - F D* G] and shares q's contraction /
    isometry / co-isometry class.
    """
    d = la.cmatrix(d)
    _require_contraction(d, "D", tol)
    dd, dds, ed, fds = defect_data(d, tol)
    if q.in_dim != ed.dim or q.out_dim != fds.dim:
        raise ShapeMismatch(
            f"Q acts on spaces of dim {(q.out_dim, q.in_dim)}, defects of D have "
            f"dims {(fds.dim, ed.dim)}"
        )
    if la.opnorm(q.d) > tol.eq_abs:
        raise ShapeMismatch("upper-left block of Q must vanish")
    c = dds @ fds.basis @ q.c
    b = q.b @ (adj(ed.basis) @ dd)
    dstar_restr = adj(ed.basis) @ adj(d) @ fds.basis
    a = q.a - q.b @ dstar_restr @ q.c
    return BlockMatrix(d, c, b, a)


def shmulyan_transform(t: np.ndarray, z: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Fractional-linear image Q = T + D_T* Z (I + T* Z)^{-1} D_T.

    ``z`` is an ambient matrix of the same shape as ``t`` supported on the
    defect spaces (rows of Z* in ran D_T, columns in ran D_T*).  Requires
    -1 outside the spectrum of T*Z.
    """
    t, z = la.cmatrix(t), la.cmatrix(z)
    if t.shape != z.shape:
        raise ShapeMismatch(f"T has shape {t.shape}, Z has shape {z.shape}")
    _require_contraction(t, "T", tol)
    _require_contraction(z, "Z", tol)
    cols = t.shape[1]
    dt = la.defect_of(t, tol).op
    dts = la.defect_of(t, tol, adjoint=True).op
    pencil = la.eye(cols) + adj(t) @ z
    if cols and np.linalg.svd(pencil, compute_uv=False)[-1] <= tol.eq_abs:
        raise SingularPencil("-1 is an eigenvalue of T*Z")
    if cols == 0:
        return t.copy()
    return t + dts @ z @ np.linalg.solve(pencil, dt)
