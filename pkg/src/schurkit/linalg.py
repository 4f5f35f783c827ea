"""Dense complex linear algebra with explicit rank decisions.

All matrices are 2-D ``numpy`` arrays of ``complex128``; zero-dimensional
shapes such as ``(p, 0)`` are legal everywhere and behave like the empty
operator between the corresponding spaces.  Every rank decision in the
package funnels through a single relative singular-value cutoff
(``Tolerance.rank_rel``), and every approximate comparison through one
absolute tolerance (``Tolerance.eq_abs``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbientMismatch, IndefiniteBeyondTolerance, NotHermitian


@dataclass(frozen=True)
class Tolerance:
    """Numerical knobs shared by the whole package.

    rank_rel : relative singular-value cutoff for rank decisions
    eq_abs   : absolute tolerance for approximate equality tests
    """

    rank_rel: float = 1e-10
    eq_abs: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.rank_rel < 1.0):
            raise ValueError("rank_rel must lie in (0, 1)")
        if self.eq_abs <= 0.0:
            raise ValueError("eq_abs must be positive")


DEFAULT_TOL = Tolerance()


def cmatrix(data, rows=None, cols=None) -> np.ndarray:
    """Coerce ``data`` to a 2-D complex matrix.

    ``rows``/``cols`` are required only when ``data`` is empty and the
    shape cannot be inferred.
    """
    a = np.asarray(data, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if rows is not None and cols is not None and a.size == 0:
        a = a.reshape(rows, cols)
    return a


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=complex)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def adj(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def opnorm(m: np.ndarray) -> float:
    """Operator (spectral) norm; 0 for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def matnorm_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Spectral norm of a - b; infinity when shapes differ."""
    if a.shape != b.shape:
        return float("inf")
    return opnorm(a - b)


@dataclass(frozen=True)
class Subspace:
    """A closed subspace of C^d stored as an orthonormal column basis.

    ``basis`` has shape ``(ambient_dim, k)`` with ``basis* basis = I_k``;
    ``k = 0`` encodes the trivial subspace.
    """

    ambient_dim: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ adj(self.basis)

    def complement(self, tol: Tolerance = DEFAULT_TOL) -> "Subspace":
        """Orthogonal complement within the ambient space."""
        return kernel_basis(adj(self.basis), tol)

    def contains(self, other: "Subspace", tol: Tolerance = DEFAULT_TOL) -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatch("subspaces live in different ambient spaces")
        resid = other.basis - self.projector() @ other.basis
        return opnorm(resid) <= tol.eq_abs


def subspace(basis, ambient_dim=None, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Wrap an orthonormal-column matrix as a :class:`Subspace`.

    Raises ``ValueError`` when the columns are not orthonormal to 1e-12.
    """
    b = cmatrix(basis, rows=ambient_dim, cols=0)
    d = b.shape[0] if ambient_dim is None else ambient_dim
    if b.shape[0] != d:
        raise AmbientMismatch(f"basis rows {b.shape[0]} != ambient {d}")
    gram = adj(b) @ b
    if matnorm_diff(gram, eye(b.shape[1])) > 1e-12:
        raise ValueError("basis columns are not orthonormal")
    return Subspace(d, b)


def full_space(d: int) -> Subspace:
    return Subspace(d, eye(d))


def trivial_space(d: int) -> Subspace:
    return Subspace(d, zeros(d, 0))


def _check_hermitian(h: np.ndarray, tol: Tolerance) -> np.ndarray:
    if h.shape[0] != h.shape[1]:
        raise NotHermitian(f"matrix of shape {h.shape} is not square")
    if matnorm_diff(h, adj(h)) > tol.eq_abs:
        raise NotHermitian("matrix is not Hermitian within eq_abs")
    return (h + adj(h)) / 2.0


def psd_sqrt(h: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in ``[-eq_abs, 0)`` are rounding debris and are clamped to
    zero before taking the root; anything below ``-eq_abs`` is an error.
    """
    h = _check_hermitian(cmatrix(h), tol)
    if h.shape[0] == 0:
        return h.copy()
    w, v = np.linalg.eigh(h)
    if w[0] < -tol.eq_abs:
        raise IndefiniteBeyondTolerance(f"eigenvalue {w[0]:.3e} < -eq_abs")
    w = np.sqrt(np.clip(w, 0.0, None))
    s = (v * w) @ adj(v)
    return (s + adj(s)) / 2.0


def svd(m: np.ndarray):
    """Thin SVD with empty-shape support; singular values descending."""
    m = cmatrix(m)
    if min(m.shape) == 0:
        k = 0
        return zeros(m.shape[0], k), np.zeros(0), zeros(k, m.shape[1])
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return u, s, vh


@dataclass(frozen=True)
class DefectData:
    """Defect operator of a contraction with one shared rank decision.

    ``op`` is the PSD square root of I - X*X (or I - XX*), ``op_pinv`` its
    Moore-Penrose inverse on exactly the kept directions, ``space`` the
    defect subspace (ran op) and ``kernel`` its orthocomplement (ker op).
    """

    op: np.ndarray
    op_pinv: np.ndarray
    space: Subspace
    kernel: Subspace


def defect_of(x: np.ndarray, tol: Tolerance = DEFAULT_TOL, adjoint: bool = False) -> DefectData:
    """Defect data of a contraction, decided on the squared defect.

    The rank call is made on the eigenvalues of I - X*X, whose rounding
    noise is of machine-epsilon size; deciding on the square-root scale
    would amplify that noise to its square root and swallow genuine kernel
    directions.  Eigenvalues at or below rank_rel (the defect spectrum
    lives in [0, 1]) are treated as exact zeros, so ``op`` vanishes on the
    kernel and ``op @ op_pinv`` is the projector onto the defect space.
    """
    x = cmatrix(x)
    n = x.shape[0] if adjoint else x.shape[1]
    if n == 0:
        e = zeros(0, 0)
        return DefectData(e, e, trivial_space(0), trivial_space(0))
    h = eye(n) - (x @ adj(x) if adjoint else adj(x) @ x)
    h = (h + adj(h)) / 2.0
    w, v = np.linalg.eigh(h)
    if w[0] < -tol.eq_abs:
        raise IndefiniteBeyondTolerance(
            f"defect eigenvalue {w[0]:.3e} < -eq_abs; not a contraction"
        )
    w = np.clip(w, 0.0, None)
    cut = tol.rank_rel * max(1.0, float(w[-1]))
    keep = w > cut
    s = np.where(keep, np.sqrt(w), 0.0)
    op = (v * s) @ adj(v)
    op = (op + adj(op)) / 2.0
    inv = np.divide(1.0, s, out=np.zeros_like(s), where=keep)
    op_pinv = (v * inv) @ adj(v)
    op_pinv = (op_pinv + adj(op_pinv)) / 2.0
    k = int(np.sum(keep))
    if k == n:
        space = full_space(n)
    else:
        space = Subspace(n, v[:, keep])
    if k == 0:
        kernel = full_space(n)
    elif k == n:
        kernel = trivial_space(n)
    else:
        kernel = Subspace(n, v[:, ~keep])
    return DefectData(op, op_pinv, space, kernel)


def numerical_rank(s: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    """Rank from a descending singular-value array."""
    if s.size == 0 or s[0] <= tol.eq_abs:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def pinv(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with the package rank cutoff."""
    m = cmatrix(m)
    if min(m.shape) == 0:
        return zeros(m.shape[1], m.shape[0])
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(s, tol)
    if r == 0:
        return zeros(m.shape[1], m.shape[0])
    return adj(vh[:r]) @ ((1.0 / s[:r])[:, None] * adj(u[:, :r]))


def kernel_basis(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the numerical null space of ``m``.

    Right singular vectors whose singular value falls at or below the rank
    cutoff; all of them when the whole matrix is negligible.  A full kernel
    is canonicalized to the identity basis.
    """
    m = cmatrix(m)
    n = m.shape[1]
    if n == 0:
        return trivial_space(0)
    if m.shape[0] == 0:
        return full_space(n)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    r = numerical_rank(s, tol)
    if r == 0:
        return full_space(n)
    return Subspace(n, adj(vh[r:]))


def range_basis(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the numerical column space of ``m``.

    Complements :func:`kernel_basis`: ranks add up to the column count.  A
    full range is canonicalized to the identity basis, which keeps defect
    bases stable across equal-rank recomputations.
    """
    m = cmatrix(m)
    d = m.shape[0]
    if d == 0 or m.shape[1] == 0:
        return trivial_space(d)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(s, tol)
    if r == d:
        return full_space(d)
    return Subspace(d, u[:, :r])


def subspace_intersect(u: Subspace, v: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Intersection of two subspaces of the same ambient space.

    Computed as the kernel of the stacked projector complements: x lies in
    the intersection iff (I - P_U)x = 0 and (I - P_V)x = 0.
    """
    if u.ambient_dim != v.ambient_dim:
        raise AmbientMismatch(f"ambient {u.ambient_dim} != {v.ambient_dim}")
    d = u.ambient_dim
    stacked = np.vstack([eye(d) - u.projector(), eye(d) - v.projector()])
    return kernel_basis(stacked, tol)


def projector(u: Subspace) -> np.ndarray:
    return u.projector()


def subspace_eq(u: Subspace, v: Subspace, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Basis-free equality via projector distance."""
    if u.ambient_dim != v.ambient_dim:
        raise AmbientMismatch(f"ambient {u.ambient_dim} != {v.ambient_dim}")
    return matnorm_diff(u.projector(), v.projector()) <= tol.eq_abs


def image_subspace(m: np.ndarray, u: Subspace, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """The subspace m(U) as a numerical range."""
    return range_basis(cmatrix(m) @ u.basis, tol)


def is_contraction(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    return opnorm(cmatrix(m)) <= 1.0 + tol.eq_abs


def is_isometry(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = cmatrix(m)
    if m.shape[1] > m.shape[0]:
        return False
    return matnorm_diff(adj(m) @ m, eye(m.shape[1])) <= tol.eq_abs


def is_coisometry(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_isometry(adj(cmatrix(m)), tol)


def is_unitary(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True for square matrices with M*M = MM* = I; a 0x0 matrix is unitary."""
    m = cmatrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return is_isometry(m, tol) and is_coisometry(m, tol)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary (QR of a complex Ginibre matrix)."""
    if n == 0:
        return zeros(0, 0)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def matrix_to_json(m: np.ndarray) -> dict:
    """Serialize to ``{"rows": r, "cols": c, "data": [[re, im], ...]}``."""
    m = cmatrix(m)
    data = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise ValueError(f"data length {len(data)} != rows*cols = {rows * cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    return flat.reshape(rows, cols)
