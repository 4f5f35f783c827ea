"""Discrete-time linear systems and their transfer functions.

A system tau = {[D C; B A]; input, output, state} evolves

    h_{k+1} = A h_k + B xi_k,      sigma_k = C h_k + D xi_k,

and is passive / isometric / co-isometric / conservative according to the
class of its colligation matrix [D C; B A].  This module evaluates transfer
functions on the open unit disk, runs the time-domain recursion, decides
controllability / observability / simplicity, builds the characteristic
colligation of a contraction, splits constants into pure and unitary parts,
computes the defect functions of a simple conservative system, and searches
for state-space unitary similarities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import linalg as la
from .blockparam import BlockMatrix
from .contractions import Contraction
from .errors import (
    DimMismatch,
    NotContraction,
    NotSimpleConservative,
    OutsideDisk,
    RankInconsistency,
    ShapeMismatch,
)
from .linalg import DEFAULT_TOL, Subspace, Tolerance, adj


def disk_grid(radii: Sequence[float] = (0.3, 0.6, 0.9), n_angles: int = 8,
              include_zero: bool = True) -> list[complex]:
    """Deterministic sampling grid inside the unit disk (25 points by default)."""
    pts: list[complex] = [0j] if include_zero else []
    for r in radii:
        for k in range(n_angles):
            pts.append(r * np.exp(2j * np.pi * k / n_angles))
    return pts


@dataclass(frozen=True)
class SampledFunction:
    """A matrix-valued function on the open unit disk."""

    in_dim: int
    out_dim: int
    eval_fn: Callable[[complex], np.ndarray]

    def __call__(self, lam: complex) -> np.ndarray:
        if abs(lam) >= 1.0:
            raise OutsideDisk(f"|lambda| = {abs(lam):.6f} >= 1")
        value = la.cmatrix(self.eval_fn(lam), rows=self.out_dim, cols=self.in_dim)
        if value.shape != (self.out_dim, self.in_dim):
            raise ShapeMismatch(
                f"evaluator returned shape {value.shape}, declared {(self.out_dim, self.in_dim)}"
            )
        return value


def const_function(value: np.ndarray) -> SampledFunction:
    value = la.cmatrix(value)
    return SampledFunction(value.shape[1], value.shape[0], lambda lam: value)


def grid_distance(f: SampledFunction, g: SampledFunction,
                  grid: Sequence[complex] | None = None) -> float:
    """Max spectral-norm deviation over the grid; inf on shape mismatch."""
    if (f.in_dim, f.out_dim) != (g.in_dim, g.out_dim):
        return float("inf")
    pts = disk_grid() if grid is None else grid
    return max(la.matnorm_diff(f(lam), g(lam)) for lam in pts)


def schur_norm_excess(f: SampledFunction, grid: Sequence[complex] | None = None) -> float:
    """max(0, sup ||f|| - 1) over the grid; 0 for Schur-class samples."""
    pts = disk_grid() if grid is None else grid
    return max(0.0, max(la.opnorm(f(lam)) for lam in pts) - 1.0)


@dataclass(frozen=True)
class SystemClassification:
    passive: bool
    isometric: bool
    coisometric: bool
    conservative: bool
    controllable: bool
    observable: bool
    simple: bool
    minimal: bool

    def as_dict(self) -> dict:
        return {
            "passive": self.passive,
            "isometric": self.isometric,
            "coisometric": self.coisometric,
            "conservative": self.conservative,
            "controllable": self.controllable,
            "observable": self.observable,
            "simple": self.simple,
            "minimal": self.minimal,
        }


class DiscreteSystem:
    """A discrete-time system with square state block."""

    def __init__(self, block: BlockMatrix, tol: Tolerance = DEFAULT_TOL):
        if block.state_in_dim != block.state_out_dim:
            raise ShapeMismatch("state block must be square for a discrete-time system")
        self.block = block
        self.tol = tol

    @property
    def d(self) -> np.ndarray:
        return self.block.d

    @property
    def c(self) -> np.ndarray:
        return self.block.c

    @property
    def b(self) -> np.ndarray:
        return self.block.b

    @property
    def a(self) -> np.ndarray:
        return self.block.a

    @property
    def in_dim(self) -> int:
        return self.block.in_dim

    @property
    def out_dim(self) -> int:
        return self.block.out_dim

    @property
    def state_dim(self) -> int:
        return self.block.state_in_dim

    def colligation(self) -> np.ndarray:
        return self.block.assemble()

    def is_passive(self) -> bool:
        return la.is_contraction(self.colligation(), self.tol)

    def is_conservative(self) -> bool:
        return la.is_unitary(self.colligation(), self.tol)

    def transfer(self, lam: complex) -> np.ndarray:
        """Theta(lambda) = D + lambda C (I - lambda A)^{-1} B."""
        if abs(lam) >= 1.0:
            raise OutsideDisk(f"|lambda| = {abs(lam):.6f} >= 1")
        if self.state_dim == 0:
            return self.d.copy()
        resolvent = np.linalg.solve(la.eye(self.state_dim) - lam * self.a, self.b)
        return self.d + lam * (self.c @ resolvent)

    def sampled(self) -> SampledFunction:
        return SampledFunction(self.in_dim, self.out_dim, self.transfer)

    def simulate(self, inputs: Sequence[np.ndarray], h0=None):
        """Run the recursion; returns (states, outputs) with len(states) =
        len(inputs) + 1."""
        if h0 is None:
            h = np.zeros(self.state_dim, dtype=complex)
        else:
            h = np.asarray(h0, dtype=complex).reshape(-1)
        if h.shape[0] != self.state_dim:
            raise ShapeMismatch(f"initial state has dim {h.shape[0]}, expected {self.state_dim}")
        states = [h]
        outputs = []
        for xi in inputs:
            xi = np.asarray(xi, dtype=complex).reshape(-1)
            if xi.shape[0] != self.in_dim:
                raise ShapeMismatch(f"input has dim {xi.shape[0]}, expected {self.in_dim}")
            outputs.append(self.c @ h + self.d @ xi)
            h = self.a @ h + self.b @ xi
            states.append(h)
        return states, outputs

    def controllable_subspace(self) -> Subspace:
        """Span of A^n B for n below the state dimension (Cayley-Hamilton cap)."""
        d = self.state_dim
        if d == 0:
            return la.trivial_space(0)
        blocks, power = [], la.eye(d)
        for _ in range(d):
            blocks.append(power @ self.b)
            power = self.a @ power
        return la.range_basis(np.hstack(blocks), self.tol)

    def observable_subspace(self) -> Subspace:
        d = self.state_dim
        if d == 0:
            return la.trivial_space(0)
        blocks, power = [], la.eye(d)
        for _ in range(d):
            blocks.append(power @ adj(self.c))
            power = adj(self.a) @ power
        return la.range_basis(np.hstack(blocks), self.tol)

    def classify(self) -> SystemClassification:
        """Classification flags; conservative systems are cross-checked
        against the defect-kernel characterization of the controllable and
        observable complements."""
        full = self.colligation()
        passive = la.is_contraction(full, self.tol)
        isometric = la.is_isometry(full, self.tol)
        coisometric = la.is_coisometry(full, self.tol)
        conservative = isometric and coisometric
        d = self.state_dim
        ctrl = self.controllable_subspace()
        obs = self.observable_subspace()
        controllable = ctrl.dim == d
        observable = obs.dim == d
        joint = la.range_basis(np.hstack([ctrl.basis, obs.basis]), self.tol)
        simple = joint.dim == d
        if conservative and d > 0:
            state = Contraction(self.a, self.tol)
            ctrl_perp_kernels = state.h_subspace(0, d).space
            obs_perp_kernels = state.h_subspace(d, 0).space
            if (
                la.matnorm_diff(ctrl.complement(self.tol).projector(),
                                ctrl_perp_kernels.projector()) > 1e-7
                or la.matnorm_diff(obs.complement(self.tol).projector(),
                                   obs_perp_kernels.projector()) > 1e-7
            ):
                raise RankInconsistency(
                    "Krylov and defect-kernel characterizations disagree"
                )
        return SystemClassification(
            passive, isometric, coisometric, conservative,
            controllable, observable, simple, controllable and observable,
        )

    def is_simple_conservative(self) -> bool:
        cls = self.classify()
        return cls.conservative and cls.simple


def discrete_system(d, c, b, a, tol: Tolerance = DEFAULT_TOL) -> DiscreteSystem:
    return DiscreteSystem(
        BlockMatrix(la.cmatrix(d), la.cmatrix(c), la.cmatrix(b), la.cmatrix(a)), tol
    )


def char_colligation(a: Contraction) -> DiscreteSystem:
    """The conservative colligation [-A, D_A*; D_A, A*] restricted to the
    defect bases of A; its transfer function is the characteristic function
    of A, and it is simple exactly when A is completely non-unitary."""
    u = a.defect_a.basis
    v = a.defect_astar.basis
    return discrete_system(
        -adj(v) @ a.a @ u, adj(v) @ a.d_astar, a.d_a @ u, adj(a.a), a.tol
    )


def char_function(a: Contraction) -> SampledFunction:
    """Characteristic function of A in the defect bases of A and A*."""
    u = a.defect_a.basis
    v = a.defect_astar.basis
    d = a.dim

    def evaluate(lam: complex) -> np.ndarray:
        core = -a.a + lam * (a.d_astar @ np.linalg.solve(la.eye(d) - lam * adj(a.a), a.d_a))
        return adj(v) @ core @ u

    return SampledFunction(a.defect_a.dim, a.defect_astar.dim, evaluate)


@dataclass(frozen=True)
class PureSplit:
    """Block-diagonalization of a contraction into pure and unitary parts.

    Bases: ``dom_pure``/``dom_ker`` split the domain into the defect space
    of the value and its kernel complement; ``cod_pure``/``cod_ker`` do the
    same in the codomain.  ``offdiag_residual`` certifies block-diagonality.
    """

    dom_pure: Subspace
    dom_ker: Subspace
    cod_pure: Subspace
    cod_ker: Subspace
    pure: np.ndarray
    unitary: np.ndarray
    offdiag_residual: float


def pure_part(theta0: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> PureSplit:
    """Split a contractive constant into its pure block and unitary block."""
    theta0 = la.cmatrix(theta0)
    if not la.is_contraction(theta0, tol):
        raise NotContraction("pure part is defined for contractions only")
    dt = la.defect_of(theta0, tol)
    dts = la.defect_of(theta0, tol, adjoint=True)
    dom_pure, dom_ker = dt.space, dt.kernel
    cod_pure, cod_ker = dts.space, dts.kernel
    pure = adj(cod_pure.basis) @ theta0 @ dom_pure.basis
    unitary = adj(cod_ker.basis) @ theta0 @ dom_ker.basis
    off = max(
        la.opnorm(adj(cod_ker.basis) @ theta0 @ dom_pure.basis),
        la.opnorm(adj(cod_pure.basis) @ theta0 @ dom_ker.basis),
    )
    return PureSplit(dom_pure, dom_ker, cod_pure, cod_ker, pure, unitary, off)


def pure_part_function(f: SampledFunction, tol: Tolerance = DEFAULT_TOL):
    """Pointwise pure part of a Schur-class function.

    The splitting bases come from f(0); the range of the defect of a
    Schur-class value does not move with lambda, so one split serves the
    whole disk.  Returns (split, pure function).
    """
    split = pure_part(f(0), tol)
    ep, fp = split.dom_pure.basis, split.cod_pure.basis

    def evaluate(lam: complex) -> np.ndarray:
        return adj(fp) @ f(lam) @ ep

    return split, SampledFunction(split.dom_pure.dim, split.cod_pure.dim, evaluate)


@dataclass(frozen=True)
class DefectFunctions:
    """Right and left defect functions with their sampling subspaces."""

    phi: SampledFunction
    psi: SampledFunction
    omega: Subspace
    omega_star: Subspace


def defect_functions(sys: DiscreteSystem, require_simple: bool = True) -> DefectFunctions:
    """Defect (spectral-factor) functions of a simple conservative system.

    phi(lambda) = P_Omega (I - lambda A)^{-1} B with
    Omega = (observable)^perp (-) A (observable)^perp, and
    psi(lambda) = C (I - lambda A)^{-1} restricted to
    Omega* = (controllable)^perp (-) A* (controllable)^perp.
    phi vanishes iff the system is observable, psi iff controllable.
    ``require_simple=False`` evaluates the same formulas on a conservative
    system with a non-simple part, for diagnostic use.
    """
    cls = sys.classify()
    if not cls.conservative or (require_simple and not cls.simple):
        raise NotSimpleConservative("defect functions need a simple conservative system")
    tol = sys.tol
    d = sys.state_dim
    obs_perp = sys.observable_subspace().complement(tol)
    ctrl_perp = sys.controllable_subspace().complement(tol)
    omega = la.subspace_intersect(
        obs_perp, la.kernel_basis(adj(sys.a @ obs_perp.basis), tol), tol
    )
    omega_star = la.subspace_intersect(
        ctrl_perp, la.kernel_basis(adj(adj(sys.a) @ ctrl_perp.basis), tol), tol
    )

    def phi_eval(lam: complex) -> np.ndarray:
        return adj(omega.basis) @ np.linalg.solve(la.eye(d) - lam * sys.a, sys.b)

    def psi_eval(lam: complex) -> np.ndarray:
        return sys.c @ np.linalg.solve(la.eye(d) - lam * sys.a, omega_star.basis)

    return DefectFunctions(
        SampledFunction(sys.in_dim, omega.dim, phi_eval),
        SampledFunction(omega_star.dim, sys.out_dim, psi_eval),
        omega,
        omega_star,
    )


def intertwining_residual(s1: DiscreteSystem, s2: DiscreteSystem, u: np.ndarray) -> float:
    """Max residual of U A1 = A2 U, U B1 = B2, C1 = C2 U and unitarity of U."""
    return max(
        la.matnorm_diff(u @ s1.a, s2.a @ u),
        la.matnorm_diff(u @ s1.b, s2.b),
        la.matnorm_diff(s1.c, s2.c @ u),
        la.matnorm_diff(adj(u) @ u, la.eye(s1.state_dim)),
        la.matnorm_diff(u @ adj(u), la.eye(s2.state_dim)),
    )


def unitarily_similar(
    s1: DiscreteSystem, s2: DiscreteSystem, cert_tol: float = 1e-7
) -> Optional[np.ndarray]:
    """Search for a unitary U with U A1 = A2 U, U B1 = B2, C1 = C2 U.

    The intertwining equations are solved as one least-squares system and
    the solution is certified; a failed certificate is retried after polar
    projection onto the unitary group.  Completeness is guaranteed only for
    simple systems, where the intertwiner is unique.
    """
    if s1.in_dim != s2.in_dim or s1.out_dim != s2.out_dim:
        raise DimMismatch("systems must share input and output dimensions")
    d1, d2 = s1.state_dim, s2.state_dim
    if d1 != d2:
        return None
    if d1 == 0:
        u = la.zeros(0, 0)
        return u if la.matnorm_diff(s1.d, s2.d) <= cert_tol else None
    i1, i2 = la.eye(d1), la.eye(d2)
    rows = [
        np.kron(s1.a.T, i2) - np.kron(i1, s2.a),
        np.kron(s1.b.T, i2),
        np.kron(i1, s2.c),
    ]
    rhs = np.concatenate([
        np.zeros(d1 * d2, dtype=complex),
        s2.b.flatten(order="F"),
        s1.c.flatten(order="F"),
    ])
    sol = np.linalg.lstsq(np.vstack(rows), rhs, rcond=None)[0]
    u = sol.reshape(d2, d1, order="F")
    if intertwining_residual(s1, s2, u) <= cert_tol:
        return u
    uu, _, vh = np.linalg.svd(u)
    u_polar = uu @ vh
    if intertwining_residual(s1, s2, u_polar) <= cert_tol:
        return u_polar
    return None


def random_conservative_system(
    state_dim: int,
    io_dim: int,
    rng: np.random.Generator,
    tol: Tolerance = DEFAULT_TOL,
    require_simple: bool = True,
    max_tries: int = 64,
) -> DiscreteSystem:
    """Haar-random unitary colligation, rejection-sampled to be simple."""
    for _ in range(max_tries):
        u = la.haar_unitary(io_dim + state_dim, rng)
        sys = discrete_system(
            u[:io_dim, :io_dim], u[:io_dim, io_dim:], u[io_dim:, :io_dim], u[io_dim:, io_dim:],
            tol,
        )
        if not require_simple or sys.is_simple_conservative():
            return sys
    raise RuntimeError("failed to draw a simple conservative system")
