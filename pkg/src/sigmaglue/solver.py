"""Nonlinear driver: proper error, quadratic remainder, Newton schemes.

Equations are imposed at interior t-nodes; the two end rows carry the
Dirichlet data u = u_eps. Residuals near the middle of a long neck are
tiny compared with the entries of B, so radial solves optionally finish
with a few refinement steps whose residuals are evaluated in extended
precision (mpmath) while the linear solves stay in float64.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb

import mpmath
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (ConeExit, DomainError, MaxIterError, PositivityLoss,
                     SingularSystemError)
from .grid import RadialProfile, ZonalField
from .linop import linearize
from .neck import (NeckConfig, background, build_u_eps, regions, zeta_eps)
from .schouten import (CylinderBackground, assemble_B, assemble_B_direct, const,
                       curvature_sigmas, interior, nonlinear_op, power)
from .schwarzschild import sphere_profile
from .symfun import Dimensions, elementary, newton_transform

SCHEMES = ("paper-frozen", "full-newton")
PRECISIONS = ("float", "mixed")
DEFAULT_SWEEP = tuple(10.0 ** -np.array([1.0, 1.5, 2.0, 2.5, 3.0]))


# ---------------------------------------------------------------- proper error

def proper_error_exponent(dims: Dimensions, delta: float) -> float:
    """nu = ((n-2k)/n) ((n+2k)/(2k) + delta)."""
    n, k = dims.n, dims.k
    return (n - 2 * k) / n * ((n + 2 * k) / (2 * k) + delta)


def proper_error_weight(dims: Dimensions, delta: float) -> float:
    """delta - (n-2k)(2k-1)/(2k), the weight of the target space."""
    n, k = dims.n, dims.k
    return delta - (n - 2 * k) * (2 * k - 1) / (2 * k)


@dataclass
class ProperErrorReport:
    eps: list
    norms: list
    region_norms: list
    argmax_t: list
    slope: float
    intercept: float
    fit_residual: float
    predicted: float

    @property
    def ratio(self) -> float:
        return self.slope / self.predicted


def proper_error_norm(cfg: NeckConfig) -> tuple:
    """(weighted sup of N(u_eps), per-region maxima, location of the max)."""
    t = cfg.grid()
    u = build_u_eps(cfg, t)
    N = nonlinear_op(u, background(cfg, t))
    weight = proper_error_weight(cfg.dims, cfg.delta)
    val = zeta_eps(cfg, t) ** weight * np.abs(N)
    # end rows carry Dirichlet data, not the equation
    val[0] = val[-1] = 0.0
    masks = regions(cfg, t)
    per = {name: float(np.max(val[m])) for name, m in masks.items() if np.any(m)}
    return float(np.max(val)), per, float(t[np.argmax(val)])


def proper_error(dims: Dimensions, delta: float = 0.0, eps_list=DEFAULT_SWEEP,
                 background_kind: str = "sphere", nt: int = 2001, order: int = 4) -> ProperErrorReport:
    """Weighted proper error over an eps sweep with a log-log slope fit."""
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2:
        raise DomainError("the sweep needs at least two values of eps")
    norms, per, where = [], [], []
    for eps in eps_list:
        cfg = NeckConfig(dims, eps, delta, background_kind, nt=nt, order=order)
        v, r, tm = proper_error_norm(cfg)
        norms.append(v)
        per.append(r)
        where.append(tm)
    x, y = np.log(eps_list), np.log(norms)
    (slope, icpt), res, *_ = np.polyfit(x, y, 1, full=True)
    fit_res = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return ProperErrorReport(eps_list, norms, per, where, float(slope), float(icpt), fit_res,
                             proper_error_exponent(dims, delta))


def sphere_proper_error(dims: Dimensions, t_max: float = 5.0, nt: int = 2001, order: int = 4) -> float:
    """Interior max |N| of the exact sphere profile on the flat cylinder."""
    t = np.linspace(-t_max, t_max, nt)
    u = sphere_profile(dims, t, 0.0, order)
    return float(np.max(np.abs(interior(nonlinear_op(u, CylinderBackground(dims)), order // 2))))


# ---------------------------------------------------------- quadratic remainder

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


def quadratic_remainder(u, w, bg: CylinderBackground, method: str = "direct") -> np.ndarray:
    """Q(u)(w) = N(u + w) - N(u) - L(u)[w].

    ``method='gauss'`` evaluates -int_0^1 (L(u) - L(u + s w))[w] ds with a
    5-point Gauss rule instead.
    """
    w = np.asarray(getattr(w, "values", w), dtype=float)
    if not np.all(u.values + w > 0):
        raise PositivityLoss("u + w must stay positive")
    L0 = linearize(u, bg)
    if method == "direct":
        return nonlinear_op(u.with_values(u.values + w), bg) - nonlinear_op(u, bg) - L0.apply(w)
    if method == "gauss":
        s = 0.5 * (_GAUSS_X + 1.0)
        acc = np.zeros(u.shape)
        for si, wi in zip(s, 0.5 * _GAUSS_W):
            acc = acc + wi * linearize(u.with_values(u.values + si * w), bg).apply(w)
        return acc - L0.apply(w)
    raise DomainError("method must be 'direct' or 'gauss'")


# ------------------------------------------------------------------ Newton

@dataclass
class SolveConfig:
    cfg: NeckConfig
    scheme: str = "paper-frozen"
    tol: float = 1e-10
    max_iter: int = 30
    precision: str = "mixed"
    dps: int = 32
    cone_policy: str = "abort"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")
        if self.precision not in PRECISIONS:
            raise DomainError(f"precision must be one of {PRECISIONS}")
        if self.cone_policy not in ("abort", "report"):
            raise DomainError("cone_policy must be 'abort' or 'report'")


@dataclass
class ConvergenceReport:
    scheme: str
    precision: str
    converged: bool = False
    iterations: int = 0
    polish_steps: int = 0
    residuals: list = field(default_factory=list)
    scaled_residuals: list = field(default_factory=list)
    corrections: list = field(default_factory=list)
    iterate_norms: list = field(default_factory=list)
    ellipticity: list = field(default_factory=list)
    cone_margins: list = field(default_factory=list)
    final_residual: float = float("nan")
    final_scaled_residual: float = float("nan")
    final_cone_margin: float = float("nan")
    rate: float = float("nan")
    rate_fit_residual: float = float("nan")
    quadratic_constants: list = field(default_factory=list)
    bound_chain_max: float = float("nan")
    relative_correction: float = float("nan")
    fixed_point_defect: float = float("nan")
    message: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _boundary_rows(u) -> np.ndarray:
    idx = np.arange(int(np.prod(u.shape))).reshape(u.shape)
    return np.concatenate([idx[0].ravel(), idx[-1].ravel()])


def _dirichlet(mat: sp.spmatrix, rows: np.ndarray) -> sp.csc_matrix:
    mat = mat.tocsr().copy()
    keep = np.ones(mat.shape[0])
    keep[rows] = 0.0
    mat = sp.diags(keep) @ mat
    bnd = np.zeros(mat.shape[0])
    bnd[rows] = 1.0
    return (mat + sp.diags(bnd)).tocsc()


def _factor(mat: sp.csc_matrix):
    try:
        return spla.splu(mat)
    except RuntimeError as exc:
        raise SingularSystemError(f"linearized operator is singular: {exc}") from exc


def _equation_residual(u, bg, rows) -> np.ndarray:
    N = np.array(nonlinear_op(u, bg), copy=True)
    flat = N.reshape(-1)
    flat[rows] = 0
    return N


def _scaled(N, u, dims: Dimensions) -> np.ndarray:
    """Deviation of sigma_k(g^{-1}A) from its target: N / (a^k u^p)."""
    a = float(dims.a)
    uf = np.asarray(u, dtype=float)
    return np.asarray(N, dtype=float) / (a ** dims.k * uf ** float(dims.power))


def cone_status(u, bg: CylinderBackground) -> tuple:
    """(ellipticity, Gamma_k margin) over interior t-nodes.

    Ellipticity is the smallest eigenvalue of T_{k-1}(g^{-1}A); the margin is
    min_{j<=k} sigma_j(g^{-1}A).
    """
    dims = bg.dims
    uf = u.with_values(np.asarray(u.values, dtype=float))
    B = assemble_B(uf, bg)
    scale = float(dims.a) * uf.values ** float(dims.weight)
    T = newton_transform(B.scaled(1.0 / scale), dims.k - 1)
    lo, hi, ww = T.eigenvalues()
    ell = float(np.min(interior(np.broadcast_to(np.minimum(lo, ww), uf.shape))))
    sig = curvature_sigmas(uf, bg, dims.k)
    margin = float(min(np.min(interior(sig[j])) for j in range(1, dims.k + 1)))
    return ell, margin


def _mpf_array(x) -> np.ndarray:
    flat = [mpmath.mpf(float(v)) for v in np.ravel(x)]
    return np.array(flat, dtype=object).reshape(np.shape(x))


def solve_dirichlet(u_init, bg: CylinderBackground, scheme: str = "paper-frozen",
                    tol: float = 1e-10, max_iter: int = 30, precision: str = "mixed",
                    dps: int = 32, cone_policy: str = "abort", scaled_tol: float = 1e-12):
    """Solve N(u) = 0 at interior nodes with u = u_init on the end rows.

    Returns (solution, ConvergenceReport). The frozen scheme inverts the
    linearization at u_init for every iterate; full Newton relinearizes.
    """
    if scheme not in SCHEMES:
        raise DomainError(f"scheme must be one of {SCHEMES}")
    dims = bg.dims
    base = u_init.with_values(np.asarray(u_init.values, dtype=float))
    rows = _boundary_rows(base)
    mixed = precision == "mixed" and isinstance(base, RadialProfile)
    rep = ConvergenceReport(scheme, "mixed" if mixed else "float")
    w = np.zeros(base.shape)
    frozen = None
    if scheme == "paper-frozen":
        L0 = linearize(base, bg)
        frozen = (L0, _factor(_dirichlet(L0.matrix, rows)))
        N0 = _equation_residual(base, bg, rows)
    size = max(1.0, float(np.max(np.abs(base.values))))
    it = 0
    stall = 0
    u = base
    N = None
    while True:
        u = base.with_values(base.values + w)
        N = _equation_residual(u, bg, rows)
        res = float(np.max(np.abs(N)))
        rep.residuals.append(res)
        rep.scaled_residuals.append(float(np.max(np.abs(_scaled(N, u.values, dims)))))
        ell, margin = cone_status(u, bg)
        rep.ellipticity.append(ell)
        rep.cone_margins.append(margin)
        if ell <= 0 and cone_policy == "abort":
            rep.message = f"linearization not elliptic at iterate {it} (min eigenvalue {ell:.3e})"
            raise ConeExit(rep.message, rep)
        if res <= tol and (not mixed or rep.scaled_residuals[-1] <= scaled_tol):
            break
        if len(rep.residuals) > 1 and res >= 0.5 * rep.residuals[-2] and res < 1e-6:
            stall += 1
        if mixed and (res <= tol or stall >= 3 or
                      (rep.corrections and rep.corrections[-1] <= 1e-13 * size)):
            break
        if it >= max_iter:
            rep.message = f"no convergence in {max_iter} iterations (residual {res:.3e})"
            raise MaxIterError(rep.message, rep)
        if scheme == "full-newton":
            J = linearize(u, bg)
            dw = _factor(_dirichlet(J.matrix, rows)).solve(-N.ravel()).reshape(u.shape)
            w_new = w + _damped(base, bg, rows, w, dw, res, ell > 0)
        else:
            L0, lu = frozen
            Q = N - N0 - L0.apply(w)
            rhs = (-N0 - Q).ravel()
            rhs[rows] = 0.0
            w_new = lu.solve(rhs).reshape(u.shape)
        if not np.all(base.values + w_new > 0):
            rep.message = f"conformal factor lost positivity at iterate {it + 1}"
            raise PositivityLoss(rep.message, rep)
        rep.corrections.append(float(np.max(np.abs(w_new - w))))
        w = w_new
        rep.iterate_norms.append(float(np.max(np.abs(w))))
        it += 1
    rep.iterations = it
    solution = u
    if mixed:
        solution = _polish(u, bg, rows, rep, tol, scaled_tol, dps, max_iter)
        N = rep._final_N
        del rep._final_N
    _finish(rep, solution, base, bg, N, frozen, rows)
    if rep.final_cone_margin <= 0:
        rep.message = f"accepted solution outside the positive cone (margin {rep.final_cone_margin:.3e})"
        raise ConeExit(rep.message, rep)
    return solution, rep


def _damped(base, bg, rows, w, dw, res, elliptic: bool, halvings: int = 20):
    """Backtracking: the largest step 2^-m dw that reduces max|N|.

    When the current iterate is elliptic the trial iterate must be too.
    """
    lam = 1.0
    for _ in range(halvings):
        trial = base.with_values(base.values + w + lam * dw, positive=False)
        if np.all(trial.values > 0):
            trial = base.with_values(trial.values)
            r = float(np.max(np.abs(_equation_residual(trial, bg, rows))))
            if (r < (1.0 - 1e-4 * lam) * res or res < 1e-9) and \
                    (not elliptic or cone_status(trial, bg)[0] > 0):
                return lam * dw
        lam *= 0.5
    return lam * dw


def _polish(u, bg, rows, rep, tol, scaled_tol, dps, max_iter):
    """Refinement steps with extended-precision residuals."""
    dims = bg.dims
    lu = _factor(_dirichlet(linearize(u, bg).matrix, rows))
    with mpmath.workdps(dps):
        bmp = None if bg.b is None else _mpf_array(bg.b)
        bg_mp = CylinderBackground(dims, bmp)
        vals = _mpf_array(u.values)
        for step in range(max_iter + 1):
            um = u.with_values(vals)
            N = _equation_residual(um, bg_mp, rows)
            Nf = np.array([float(x) for x in N.ravel()]).reshape(N.shape)
            uf = np.array([float(x) for x in vals.ravel()]).reshape(vals.shape)
            res = float(np.max(np.abs(Nf)))
            sres = float(np.max(np.abs(_scaled(Nf, uf, dims))))
            rep.residuals.append(res)
            rep.scaled_residuals.append(sres)
            if res <= tol and sres <= scaled_tol:
                break
            if rep.iterations + rep.polish_steps >= max_iter:
                rep.message = f"no convergence in {max_iter} iterations (residual {res:.3e})"
                raise MaxIterError(rep.message, rep)
            dw = lu.solve(-Nf.ravel()).reshape(Nf.shape)
            vals = vals + _mpf_array(dw)
            rep.polish_steps += 1
            rep.corrections.append(float(np.max(np.abs(dw))))
        rep._final_N = Nf
        return um


def _finish(rep, solution, base, bg, N, frozen, rows):
    dims = bg.dims
    uf = np.asarray(solution.values, dtype=float)
    Nf = np.asarray(N, dtype=float)
    rep.converged = True
    rep.final_residual = float(np.max(np.abs(Nf)))
    rep.final_scaled_residual = float(np.max(np.abs(_scaled(Nf, uf, dims))))
    _, rep.final_cone_margin = cone_status(base.with_values(uf), bg)
    w = uf - base.values
    rep.relative_correction = float(np.max(np.abs(w / base.values)))
    c = [x for x in rep.corrections if x > 0]
    if len(c) >= 3:
        k = np.arange(len(c))
        (slope, icpt), res, *_ = np.polyfit(k, np.log(c), 1, full=True)
        rep.rate = float(np.exp(slope))
        rep.rate_fit_residual = float(np.sqrt(res[0] / len(c))) if len(res) else 0.0
    rep.quadratic_constants = [c[i + 1] / c[i] ** 2 for i in range(len(c) - 1) if c[i] > 1e-7]
    if rep.iterate_norms and rep.iterate_norms[0] > 0:
        rep.bound_chain_max = float(max(rep.iterate_norms) / rep.iterate_norms[0])
    # fixed point consistency of the frozen map at the accepted w
    L0 = frozen[0] if frozen else linearize(base, bg)
    lu = frozen[1] if frozen else _factor(_dirichlet(L0.matrix, rows))
    N0 = _equation_residual(base, bg, rows)
    wq = w.reshape(base.shape)
    Q = nonlinear_op(base.with_values(uf), bg) - N0 - L0.apply(wq)
    rhs = (-N0 - Q).ravel()
    rhs[rows] = 0.0
    rep.fixed_point_defect = float(np.max(np.abs(lu.solve(rhs) - wq.ravel())))


def newton_solve(scfg: SolveConfig):
    """Solve on the truncated neck starting from u_eps, Dirichlet u = u_eps."""
    cfg = scfg.cfg
    t = cfg.grid()
    u_eps = build_u_eps(cfg, t)
    bg = background(cfg, t)
    return solve_dirichlet(u_eps, bg, scfg.scheme, scfg.tol, scfg.max_iter, scfg.precision,
                           scfg.dps, scfg.cone_policy)


def sphere_recovery(dims: Dimensions, t_max: float = 2.0, nt: int = 2001, bump: float = 0.01,
                    scheme: str = "full-newton", order: int = 4, max_iter: int = 30,
                    tol: float = 1e-9):
    """Solve from sphere * (1 + bump (e^{-t^2} - e^{-T^2})) with exact end data.

    The bump is shifted so that the guess meets the Dirichlet data without
    a kink at t = +-T. Returns (solution, report, sup error against the
    exact profile).

    The sphere is a degenerate solution: translation in t gives a near
    kernel, and u^p is tiny near long-domain ends, so the basin of Newton
    shrinks quickly with t_max and bump. The defaults stay inside it.
    """
    t = np.linspace(-t_max, t_max, nt)
    exact = sphere_profile(dims, t, 0.0, order)
    guess = exact.values * (1.0 + bump * (np.exp(-t * t) - np.exp(-t_max ** 2)))
    sol, rep = solve_dirichlet(exact.with_values(guess), CylinderBackground(dims), scheme,
                               tol, max_iter, "float")
    err = float(np.max(np.abs(np.asarray(sol.values, dtype=float) - exact.values)))
    return sol, rep, err


# ---------------------------------------------------------------- certificate

@dataclass
class Certificate:
    target: float
    deviation: float
    deviation_direct: float
    margins: dict
    min_u: float
    positive: bool
    in_cone: bool


def solution_certificate(u, bg: CylinderBackground, dps: int = 32) -> Certificate:
    """Re-evaluate sigma_k(g^{-1}A) of the final metric at interior nodes.

    Works on float or mpf data; mpf data are evaluated with ``dps`` digits.
    A second deviation uses the log-form assembly.
    """
    if np.asarray(u.values).dtype == object:
        with mpmath.workdps(dps):
            return _certificate(u, bg)
    return _certificate(u, bg)


def _certificate(u, bg: CylinderBackground) -> Certificate:
    dims = bg.dims
    k = dims.k
    exact = np.asarray(u.values).dtype == object
    if exact and bg.b is not None and np.asarray(bg.b).dtype != object:
        bg = CylinderBackground(dims, _mpf_array(bg.b))
    sig = curvature_sigmas(u, bg, k)
    target = 2.0 ** (-k) * comb(dims.n, k)
    dev = np.array([float(x) for x in np.ravel(interior(sig[k]))]) - target
    margins = {j: float(min(float(x) for x in np.ravel(interior(sig[j])))) for j in range(1, k + 1)}
    Bd = assemble_B_direct(u, bg)
    scale = const(dims.a, exact) * power(u.values, dims.weight)
    sk = elementary(Bd, k)[k] / scale ** k
    dev_d = np.array([float(x) for x in np.ravel(interior(sk))]) - target
    uf = np.asarray(u.values, dtype=float)
    return Certificate(target, float(np.max(np.abs(dev))), float(np.max(np.abs(dev_d))),
                       margins, float(np.min(uf)), bool(np.all(uf > 0)),
                       bool(min(margins.values()) > 0))
