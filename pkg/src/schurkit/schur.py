"""The Schur algorithm for matrix Schur-class functions, both ways.

Function level: peel off Gamma_n = Theta_n(0) and form the next iterate
pointwise through the Moebius parameter (the division-by-lambda route).
Realization level: read every Gamma_n off a simple conservative realization
in closed form through nested defect pseudo-inverses, and assemble, for
each n, the whole family of conservative realizations of the n-th iterate
on the state spaces H(n-k, k).  The two routes are tied together by
:func:`verify_chain`, which aligns the defect bases recorded on each side
and reports residuals.

All parameter matrices are expressed in orthonormal defect bases produced
by :func:`~schurkit.blockparam.defect_data`; the ``doms``/``codoms`` lists
record those bases as absolute subspaces of the original input and output
spaces so that quantities computed on different sides stay comparable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .blockparam import defect_data
from .contractions import Contraction
from .errors import (
    InvalidSequence,
    NotContraction,
    NotSimpleConservative,
    RangeInclusionViolated,
    RankInconsistency,
    SchurkitError,
    Terminated,
    UnitaryParameter,
    UnitaryTheta0,
)
from .linalg import DEFAULT_TOL, Subspace, Tolerance, adj
from .systems import (
    DiscreteSystem,
    SampledFunction,
    char_function,
    const_function,
    discrete_system,
    disk_grid,
    grid_distance,
    intertwining_residual,
    pure_part_function,
    unitarily_similar,
)

# Range-inclusion guard for the nested pseudo-inverse chains; violations of
# this size mean a rank decision went wrong, not rounding noise.
_RANGE_GUARD = 1e-6


def is_unitary_parameter(g: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Termination test: all singular values within 10*rank_rel of 1."""
    g = la.cmatrix(g)
    if g.shape[0] != g.shape[1]:
        return False
    if g.shape[0] == 0:
        return True
    s = np.linalg.svd(g, compute_uv=False)
    return bool(np.all(np.abs(s - 1.0) <= 10.0 * tol.rank_rel))


# Quadrature circle for the removable singularity at 0: the mean over
# _LIMIT_POINTS equispaced points at radius _LIMIT_RADIUS is the Cauchy
# integral picking the constant coefficient; for a Schur-class integrand
# the truncation error is below _LIMIT_RADIUS**_LIMIT_POINTS ~ 1e-16.
_LIMIT_RADIUS = 0.4
_LIMIT_POINTS = 40


def _limit_at_zero(evaluate) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(_LIMIT_POINTS) / _LIMIT_POINTS
    points = _LIMIT_RADIUS * np.exp(1j * angles)
    total = evaluate(points[0])
    for lam in points[1:]:
        total = total + evaluate(lam)
    return total / _LIMIT_POINTS


def _divided_step(theta: SampledFunction, gamma: np.ndarray, tol: Tolerance,
                  divide: bool) -> SampledFunction:
    """Common core of the Moebius parameter and the Schur iterate.

    Evaluates D_g* (I - Theta(lam) g*)^{-1} (Theta(lam) - g) D_g^{-1} in
    the defect bases of ``gamma``, with every inverse restricted to the
    defect subspaces so that unitary parts of gamma never enter a solve;
    divides by lambda when ``divide`` is set.
    """
    dd = la.defect_of(gamma, tol)
    dds = la.defect_of(gamma, tol, adjoint=True)
    eb, fb = dd.space.basis, dds.space.basis
    d_restr = adj(fb) @ dds.op @ fb
    j_restr = adj(eb) @ dd.op_pinv @ eb
    q = gamma.shape[0]

    def core(lam: complex) -> np.ndarray:
        t = theta(lam)
        pencil = adj(fb) @ (la.eye(q) - t @ adj(gamma)) @ fb
        num = adj(fb) @ (t - gamma) @ eb
        value = d_restr @ np.linalg.solve(pencil, num) @ j_restr
        return value / lam if divide else value

    cache: dict[str, np.ndarray] = {}

    def evaluate(lam: complex) -> np.ndarray:
        if lam == 0:
            if divide:
                if "limit" not in cache:
                    cache["limit"] = _limit_at_zero(core)
                return cache["limit"]
            return la.zeros(dds.space.dim, dd.space.dim)
        return core(lam)

    return SampledFunction(dd.space.dim, dds.space.dim, evaluate)


def oracle_step(theta: SampledFunction, tol: Tolerance = DEFAULT_TOL):
    """One function-level step: (Gamma_n, Theta_{n+1}).

    Raises :class:`UnitaryParameter` when Theta(0) is unitary, i.e. the
    algorithm has terminated and no next iterate exists.
    """
    gamma = theta(0)
    if is_unitary_parameter(gamma, tol):
        raise UnitaryParameter("Theta(0) is unitary; the iteration has terminated")
    return gamma, _divided_step(theta, gamma, tol, divide=True)


def moebius_parameter(theta: SampledFunction, tol: Tolerance = DEFAULT_TOL) -> SampledFunction:
    """The function Z with Theta = Theta(0) + D* Z (I + Theta(0)* Z)^{-1} D.

    Expressed in the defect bases of Theta(0); Z(0) = 0 exactly and
    ||Z(lambda)|| <= |lambda| on the disk.
    """
    return _divided_step(theta, theta(0), tol, divide=False)


def moebius_compose(gamma: np.ndarray, theta_next: SampledFunction,
                    tol: Tolerance = DEFAULT_TOL) -> SampledFunction:
    """Left inverse of :func:`oracle_step`:

    Theta(lam) = gamma + lam D_g* T(lam) (I + lam g* T(lam))^{-1} D_g,
    where T is ``theta_next`` expressed in the defect bases of ``gamma``.
    """
    gamma = la.cmatrix(gamma)
    if not la.is_contraction(gamma, tol):
        raise NotContraction("Schur parameter must be a contraction")
    dg, dgs, e, f = defect_data(gamma, tol)
    if (theta_next.in_dim, theta_next.out_dim) != (e.dim, f.dim):
        from .errors import ShapeMismatch

        raise ShapeMismatch(
            f"iterate acts on {(theta_next.out_dim, theta_next.in_dim)}, defects of the "
            f"parameter have dims {(f.dim, e.dim)}"
        )
    r = gamma.shape[1]

    def evaluate(lam: complex) -> np.ndarray:
        amb = f.basis @ theta_next(lam) @ adj(e.basis)
        pencil = la.eye(r) + lam * adj(gamma) @ amb
        return gamma + lam * dgs @ amb @ np.linalg.solve(pencil, dg)

    return SampledFunction(gamma.shape[1], gamma.shape[0], evaluate)


@dataclass(frozen=True)
class ChoiceSequence:
    """A finite choice sequence with its recorded defect bases.

    ``gammas[0]`` maps the input space into the output space; for n >= 1,
    ``gammas[n]`` is expressed in the bases recorded as ``doms[n]`` and
    ``codoms[n]``, which are absolute orthonormal bases (inside the input
    and output spaces) of the defect spaces of the previous parameter.
    ``terminated`` means the last parameter is unitary.
    """

    gammas: list[np.ndarray]
    doms: list[np.ndarray]
    codoms: list[np.ndarray]
    terminated: bool

    def __len__(self) -> int:
        return len(self.gammas)

    def dims(self) -> list[tuple[int, int]]:
        return [tuple(g.shape) for g in self.gammas]

    def validate(self, tol: Tolerance = DEFAULT_TOL):
        if not self.gammas:
            raise InvalidSequence("empty choice sequence")
        if len(self.doms) != len(self.gammas) or len(self.codoms) != len(self.gammas):
            raise InvalidSequence("basis lists must parallel the parameter list")
        for n, g in enumerate(self.gammas):
            if g.shape != (self.codoms[n].shape[1], self.doms[n].shape[1]):
                raise InvalidSequence(
                    f"parameter {n} has shape {g.shape}, bases give "
                    f"{(self.codoms[n].shape[1], self.doms[n].shape[1])}"
                )
            if not la.is_contraction(g, tol):
                raise InvalidSequence(f"parameter {n} has norm > 1")
            if n > 0:
                _, _, e, f = defect_data(self.gammas[n - 1], tol)
                if g.shape != (f.dim, e.dim):
                    raise InvalidSequence(
                        f"parameter {n} has shape {g.shape}, defect spaces of the "
                        f"previous parameter have dims {(f.dim, e.dim)}"
                    )
        if self.terminated and not is_unitary_parameter(self.gammas[-1], tol):
            raise InvalidSequence("terminated sequence must end in a unitary parameter")


def choice_sequence(gammas, terminated: bool, tol: Tolerance = DEFAULT_TOL) -> ChoiceSequence:
    """Build a :class:`ChoiceSequence` from raw parameter matrices.

    Each ``gammas[n]`` (n >= 1) must already be expressed in the defect
    bases that :func:`~schurkit.blockparam.defect_data` assigns to
    ``gammas[n-1]``; the absolute bases are accumulated here.
    """
    gammas = [la.cmatrix(g) for g in gammas]
    if not gammas:
        raise InvalidSequence("empty choice sequence")
    doms = [la.eye(gammas[0].shape[1])]
    codoms = [la.eye(gammas[0].shape[0])]
    for n in range(1, len(gammas)):
        _, _, e, f = defect_data(gammas[n - 1], tol)
        doms.append(doms[-1] @ e.basis)
        codoms.append(codoms[-1] @ f.basis)
    seq = ChoiceSequence(gammas, doms, codoms, terminated)
    seq.validate(tol)
    return seq


def reconstruct(seq: ChoiceSequence, tol: Tolerance = DEFAULT_TOL) -> SampledFunction:
    """Fold a choice sequence back into a Schur-class function.

    Exact (on the grid) for terminated sequences; otherwise the tail is
    truncated with a vanishing next iterate.
    """
    seq.validate(tol)
    if seq.terminated:
        current = const_function(seq.gammas[-1])
        start = len(seq.gammas) - 2
    else:
        _, _, e, f = defect_data(seq.gammas[-1], tol)
        current = const_function(la.zeros(f.dim, e.dim))
        start = len(seq.gammas) - 1
    for n in range(start, -1, -1):
        current = moebius_compose(seq.gammas[n], current, tol)
    return current


@dataclass(frozen=True)
class OracleChain:
    """Function-level side of the algorithm: parameters and iterates."""

    params: ChoiceSequence
    iterates: list[SampledFunction]


def schur_oracle(theta: SampledFunction, n_max: int,
                 tol: Tolerance = DEFAULT_TOL) -> OracleChain:
    """Run the function-level algorithm up to ``n_max`` parameters."""
    gammas: list[np.ndarray] = []
    doms = [la.eye(theta.in_dim)]
    codoms = [la.eye(theta.out_dim)]
    iterates = [theta]
    terminated = False
    current = theta
    for n in range(n_max + 1):
        try:
            gamma, nxt = oracle_step(current, tol)
        except UnitaryParameter:
            gammas.append(current(0))
            terminated = True
            break
        gammas.append(gamma)
        if n == n_max:
            break
        _, _, e, f = defect_data(gamma, tol)
        doms.append(doms[-1] @ e.basis)
        codoms.append(codoms[-1] @ f.basis)
        iterates.append(nxt)
        current = nxt
    return OracleChain(ChoiceSequence(gammas, doms[: len(gammas)], codoms[: len(gammas)],
                                      terminated), iterates)


def _require_simple_conservative(sys: DiscreteSystem):
    cls = sys.classify()
    if not (cls.conservative and cls.simple):
        raise NotSimpleConservative(
            "this construction requires a simple conservative system"
        )


class _RealizationChain:
    """Closed-form Schur parameters and iterate blocks of one system.

    Maintains, per step n, the composed defect pseudo-inverse chains

        M_n = D^{-1}(Gamma_{n-1}) ... D^{-1}(Gamma_0)   on the input side,
        N_n = D^{-1}(Gamma*_{n-1}) ... D^{-1}(Gamma*_0) on the output side,

    expressed in the accumulated defect bases, together with the absolute
    bases themselves.  Gamma_n is then

        N_n C A^{n-1} W (M_n B* W)*   with W a basis of H(n-1, 0).
    """

    def __init__(self, sys: DiscreteSystem, tol: Tolerance):
        _require_simple_conservative(sys)
        self.sys = sys
        self.tol = tol
        self.state = Contraction(sys.a, tol)
        self.gammas: list[np.ndarray] = [sys.d.copy()]
        self.doms: list[np.ndarray] = [la.eye(sys.in_dim)]
        self.codoms: list[np.ndarray] = [la.eye(sys.out_dim)]
        self.m_chains: list[np.ndarray | None] = [None]
        self.n_chains: list[np.ndarray | None] = [None]
        self.terminated = is_unitary_parameter(sys.d, tol)
        if not self.terminated:
            self._push_defect_step(sys.d, la.eye(sys.in_dim), la.eye(sys.out_dim))

    def _push_defect_step(self, gamma, m_prev, n_prev):
        dd = la.defect_of(gamma, self.tol)
        dds = la.defect_of(gamma, self.tol, adjoint=True)
        self.m_chains.append(adj(dd.space.basis) @ dd.op_pinv @ m_prev)
        self.n_chains.append(adj(dds.space.basis) @ dds.op_pinv @ n_prev)
        self.doms.append(self.doms[-1] @ dd.space.basis)
        self.codoms.append(self.codoms[-1] @ dds.space.basis)

    def last_n(self) -> int:
        return len(self.gammas) - 1

    def extend(self, n_max: int):
        """Compute parameters up to index ``n_max`` or termination."""
        while not self.terminated and self.last_n() < n_max:
            n = self.last_n() + 1
            w_prev = self.state.h_subspace(n - 1, 0).space.basis
            left = self.n_chains[n] @ self.sys.c @ self.state.power(n - 1) @ w_prev
            right = self.m_chains[n] @ adj(self.sys.b) @ w_prev
            gamma = left @ adj(right)
            self.gammas.append(gamma)
            if is_unitary_parameter(gamma, self.tol):
                self.terminated = True
                self.doms = self.doms[: n + 1]
                self.codoms = self.codoms[: n + 1]
                return
            self._check_range_inclusions(n, gamma)
            self._push_defect_step(gamma, self.m_chains[n], self.n_chains[n])

    def _check_range_inclusions(self, n: int, gamma: np.ndarray):
        """ran(M_n B* on H(n,0)) must lie in ran D(Gamma_n); likewise the
        output chain applied to C on H(0,n) in ran D(Gamma*_n)."""
        _, _, e, f = defect_data(gamma, self.tol)
        w_n0 = self.state.h_subspace(n, 0).space.basis
        w_0n = self.state.h_subspace(0, n).space.basis
        x = self.m_chains[n] @ adj(self.sys.b) @ w_n0
        y = self.n_chains[n] @ self.sys.c @ w_0n
        res_b = la.opnorm(x - e.basis @ (adj(e.basis) @ x))
        res_c = la.opnorm(y - f.basis @ (adj(f.basis) @ y))
        if max(res_b, res_c) > _RANGE_GUARD:
            raise RangeInclusionViolated(
                f"step {n}: residuals ({res_b:.3e}, {res_c:.3e}) exceed {_RANGE_GUARD:.0e}"
            )

    def choice(self) -> ChoiceSequence:
        return ChoiceSequence(
            self.gammas,
            self.doms[: len(self.gammas)],
            self.codoms[: len(self.gammas)],
            self.terminated,
        )

    def family(self, n: int) -> list[DiscreteSystem]:
        """All realizations of the n-th iterate, state spaces H(n-k, k)."""
        if n < 1 or n > self.last_n():
            raise Terminated(f"iterate index {n} lies beyond the computed chain")
        w_n0 = self.state.h_subspace(n, 0).space.basis
        if w_n0.shape[1] == 0:
            raise Terminated(f"H({n},0) is trivial; the algorithm terminated at step {n}")
        gamma = self.gammas[n]
        bstar = self.m_chains[n] @ adj(self.sys.b) @ w_n0
        systems = []
        for k in range(n + 1):
            w_nk = self.state.h_subspace(n - k, k).space.basis
            if w_nk.shape[1] != w_n0.shape[1]:
                raise RankInconsistency(
                    f"dim H({n - k},{k}) = {w_nk.shape[1]} != dim H({n},0) = {w_n0.shape[1]}"
                )
            c_blk = self.n_chains[n] @ self.sys.c @ self.state.power(n - k) @ w_nk
            b_blk = adj(w_nk) @ self.state.power(k) @ w_n0 @ adj(bstar)
            a_blk = adj(w_nk) @ self.sys.a @ w_nk
            systems.append(discrete_system(gamma, c_blk, b_blk, a_blk, self.tol))
        return systems


def gamma_from_realization(sys: DiscreteSystem, n_max: int,
                           tol: Tolerance | None = None) -> ChoiceSequence:
    """Closed-form Schur parameters of the transfer function of ``sys``.

    Stops at the first unitary parameter or after ``n_max`` steps.
    """
    chain = _RealizationChain(sys, tol or sys.tol)
    chain.extend(n_max)
    return chain.choice()


def first_iterate_systems(sys: DiscreteSystem, tol: Tolerance | None = None):
    """The three printed realizations attached to the first iterate.

    Returns (nu, zeta1, zeta2): nu realizes lambda * Theta_1 on the full
    state space; zeta1 and zeta2 realize Theta_1 on ker D_A* and ker D_A.
    """
    tol = tol or sys.tol
    _require_simple_conservative(sys)
    gamma0 = sys.d
    if is_unitary_parameter(gamma0, tol):
        raise UnitaryTheta0("Theta(0) is unitary; there is no first iterate")
    d0 = la.defect_of(gamma0, tol)
    d0s = la.defect_of(gamma0, tol, adjoint=True)
    e0, f0 = d0.space, d0s.space
    state = Contraction(sys.a, tol)
    w10 = state.h_subspace(1, 0).space.basis
    w01 = state.h_subspace(0, 1).space.basis
    dastar_pinv = la.defect_of(sys.a, tol, adjoint=True).op_pinv
    c_chain = adj(f0.basis) @ d0s.op_pinv @ sys.c
    b_chain = dastar_pinv @ sys.b @ e0.basis
    nu = discrete_system(
        la.zeros(f0.dim, e0.dim),
        c_chain,
        b_chain,
        sys.a @ w10 @ adj(w10),
        tol,
    )
    gamma1 = adj(f0.basis) @ d0s.op_pinv @ sys.c @ sys.b @ d0.op_pinv @ e0.basis
    zeta1 = discrete_system(
        gamma1,
        c_chain @ w01,
        adj(w01) @ sys.a @ w10 @ adj(w10) @ b_chain,
        adj(w01) @ sys.a @ w01,
        tol,
    )
    zeta2 = discrete_system(
        gamma1,
        c_chain @ sys.a @ w10,
        adj(w10) @ b_chain,
        adj(w10) @ sys.a @ w10,
        tol,
    )
    return nu, zeta1, zeta2


def iterate_systems(sys: DiscreteSystem, n: int,
                    tol: Tolerance | None = None) -> list[DiscreteSystem]:
    """Realizations of the n-th iterate on the state spaces H(n-k, k).

    Raises :class:`Terminated` when the algorithm stops at or before n,
    i.e. when H(n, 0) is already trivial.
    """
    if n < 1:
        raise ValueError("iterate index must be positive")
    chain = _RealizationChain(sys, tol or sys.tol)
    chain.extend(n)
    return chain.family(n)


@dataclass(frozen=True)
class SchurChain:
    """Everything the realization route produces for one source system."""

    source: DiscreteSystem
    params: ChoiceSequence
    h_chain: list[Subspace]
    families: list[list[DiscreteSystem]]  # families[j] realizes iterate j+1

    @property
    def termination_step(self) -> int | None:
        return len(self.params) - 1 if self.params.terminated else None


def build_chain(sys: DiscreteSystem, n_max: int | None = None,
                tol: Tolerance | None = None) -> SchurChain:
    """Run the realization-level algorithm and collect iterate families."""
    tol = tol or sys.tol
    cap = sys.state_dim + 1 if n_max is None else n_max
    chain = _RealizationChain(sys, tol)
    chain.extend(cap)
    last = chain.last_n()
    h_chain = [chain.state.h_subspace(n, 0).space for n in range(last + 1)]
    families = []
    for n in range(1, last + 1):
        if chain.state.h_subspace(n, 0).space.dim == 0:
            break
        families.append(chain.family(n))
    return SchurChain(sys, chain.choice(), h_chain, families)


# Residual thresholds used by verify_chain, keyed by residual kind.
CHAIN_THRESHOLDS = {
    "colligation_unitarity": 1e-9,
    "gamma": 1e-7,
    "alignment": 1e-7,
    "unitarity": 1e-9,
    "transfer_oracle": 1e-6,
    "transfer_across_k": 1e-7,
    "similarity": 1e-7,
    "pure_char": 1e-6,
    "h_monotone": 0.5,
    "termination_bound": 0.5,
    "shape": 0.5,
}


@dataclass
class ChainReport:
    """Residual table from cross-verifying a chain; ``ok`` is the verdict."""

    residuals: dict[str, float] = field(default_factory=dict)
    thresholds: dict[str, float] = field(default_factory=dict)

    def add(self, kind: str, detail: str, value: float):
        self.residuals[f"{kind}[{detail}]" if detail else kind] = float(value)
        self.thresholds.setdefault(kind, CHAIN_THRESHOLDS[kind])

    def failures(self) -> dict[str, float]:
        out = {}
        for name, value in self.residuals.items():
            kind = name.split("[", 1)[0]
            if not (value <= self.thresholds[kind]):
                out[name] = value
        return out

    @property
    def ok(self) -> bool:
        return not self.failures()

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def verify_chain(chain: SchurChain, grid=None, tol: Tolerance | None = None) -> ChainReport:
    """Cross-verify a realization chain against the function-level oracle.

    Residual groups: (a) parameters, realization versus oracle after basis
    alignment; (b) transfer functions of every iterate realization versus
    the oracle iterate, and across k; (c) unitary-similarity certificates
    across k; (d) characteristic function of the compressed state versus
    the pure part of the oracle iterate; (e) colligation unitarity and
    shape bookkeeping.  Failures are reported, never raised.
    """
    tol = tol or chain.source.tol
    pts = disk_grid() if grid is None else grid
    report = ChainReport()
    for name, thr in CHAIN_THRESHOLDS.items():
        report.thresholds[name] = thr

    full = chain.source.colligation()
    report.add(
        "colligation_unitarity",
        "",
        max(
            la.matnorm_diff(adj(full) @ full, la.eye(full.shape[1])),
            la.matnorm_diff(full @ adj(full), la.eye(full.shape[0])),
        ),
    )

    seq = chain.params
    try:
        seq.validate(tol)
        shape_bad = 0.0
    except InvalidSequence:
        shape_bad = 1.0
    report.add("shape", "", shape_bad)

    dims = [s.dim for s in chain.h_chain]
    monotone = all(dims[i] > dims[i + 1] for i in range(len(dims) - 1))
    report.add("h_monotone", "", 0.0 if monotone else 1.0)
    if seq.terminated:
        report.add(
            "termination_bound",
            "",
            0.0 if len(seq) - 1 <= chain.source.state_dim else 1.0,
        )

    oracle = schur_oracle(chain.source.sampled(), len(seq) - 1, tol)
    n_common = min(len(seq), len(oracle.params))
    for n in range(n_common):
        omega = adj(seq.doms[n]) @ oracle.params.doms[n]
        psi = adj(seq.codoms[n]) @ oracle.params.codoms[n]
        align = max(
            la.matnorm_diff(adj(omega) @ omega, la.eye(omega.shape[1])),
            la.matnorm_diff(adj(psi) @ psi, la.eye(psi.shape[1])),
        )
        report.add("alignment", str(n), align)
        report.add(
            "gamma", str(n),
            la.matnorm_diff(seq.gammas[n], psi @ oracle.params.gammas[n] @ adj(omega)),
        )

    for idx, family in enumerate(chain.families):
        n = idx + 1
        if n >= len(oracle.iterates):
            break
        omega = adj(seq.doms[n]) @ oracle.params.doms[n]
        psi = adj(seq.codoms[n]) @ oracle.params.codoms[n]
        theta_o = oracle.iterates[n]
        aligned = SampledFunction(
            omega.shape[0], psi.shape[0],
            lambda lam, th=theta_o, ps=psi, om=omega: ps @ th(lam) @ adj(om),
        )
        transfers = [s.sampled() for s in family]
        for k, s in enumerate(family):
            t = s.colligation()
            report.add(
                "unitarity", f"{n},{k}",
                max(
                    la.matnorm_diff(adj(t) @ t, la.eye(t.shape[1])),
                    la.matnorm_diff(t @ adj(t), la.eye(t.shape[0])),
                ),
            )
            report.add("transfer_oracle", f"{n},{k}", grid_distance(transfers[k], aligned, pts))
            try:
                pure_resid = _pure_char_residual(s, aligned, pts, tol)
            except SchurkitError:
                pure_resid = float("inf")
            report.add("pure_char", f"{n},{k}", pure_resid)
        for k in range(len(family) - 1):
            report.add(
                "transfer_across_k", f"{n},{k}",
                grid_distance(transfers[k], transfers[k + 1], pts),
            )
            u = unitarily_similar(family[k], family[k + 1],
                                  cert_tol=CHAIN_THRESHOLDS["similarity"])
            report.add(
                "similarity", f"{n},{k}",
                float("inf") if u is None
                else intertwining_residual(family[k], family[k + 1], u),
            )
    return report


def _pure_char_residual(s: DiscreteSystem, theta: SampledFunction, pts, tol: Tolerance) -> float:
    """Pure part of ``theta`` against the characteristic function of the
    adjoint of the state of ``s``, conjugated by the isometries that the
    anchored parametrization of the colligation provides."""
    from .blockparam import decompose_kmx

    kmx = decompose_kmx(s.block, tol)
    phi = char_function(Contraction(adj(s.a), tol))
    split, pure = pure_part_function(theta, tol)
    ep, fp = split.dom_pure.basis, split.cod_pure.basis
    resid = 0.0
    for lam in pts:
        lhs = pure(lam)
        rhs = adj(fp) @ (kmx.k @ phi(lam) @ kmx.m) @ ep
        resid = max(resid, la.matnorm_diff(lhs, rhs))
    return resid
