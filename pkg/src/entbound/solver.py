"""Forward solvers: projected gradient descent over the PPT set or the Rains set.

These are the independent check on every converse construction. Projections
onto the constraint sets run Dykstra's alternating scheme over their defining
cones (PSD cone, PSD-after-partial-transpose cone, unit-trace slice for the
PPT set; PSD cone and the partial-transpose trace-norm ball for the Rains
set). The relative-entropy objective descends along -L_σ(ρ) with
Barzilai-Borwein step seeds and Armijo backtracking, which keeps the
objective monotone per accepted step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAStateError, NotPSDError, PreconditionError
from .linalg import (
    HermitianMatrix,
    hermitian,
    min_eigenvalue,
    partial_transpose,
    trace_norm,
)
from .divergences import SUPPORT_ATOL, relative_entropy
from .ppt import SupportingFunctional, is_boundary_of_P, ppt_functional, sample_ppt_states
from .rains import sample_T

DYKSTRA_RESIDUAL = 1e-10
# Iterate spectra are floored here before logs and kernels; the minimizer may
# sit on the boundary of the PSD cone.
EIG_FLOOR = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 400
    step_init: float = 1.0
    armijo_beta: float = 0.5
    tol_grad: float = 1e-9
    tol_feas: float = 1e-9
    dykstra_iters: int = 2000
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.max_iters, self.dykstra_iters) <= 0:
            raise PreconditionError("iteration limits must be positive")
        if min(self.step_init, self.tol_grad, self.tol_feas) <= 0:
            raise PreconditionError("steps and tolerances must be positive")
        if not 0.0 < self.armijo_beta < 1.0:
            raise PreconditionError("armijo_beta must lie in (0, 1)")


def _clip_psd(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((mat + mat.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def _pt_raw(mat: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    n1, n2 = dims
    n = n1 * n2
    return mat.reshape(n1, n2, n1, n2).transpose(0, 3, 2, 1).reshape(n, n)


def _project_l1_ball(w: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection of a real vector onto the l1 ball (soft threshold)."""
    a = np.abs(w)
    if a.sum() <= radius:
        return w
    u = np.sort(a)[::-1]
    cum = np.cumsum(u)
    k = np.arange(1, a.size + 1)
    ok = u > (cum - radius) / k
    j = int(np.max(np.nonzero(ok)[0]))
    theta = (cum[j] - radius) / (j + 1)
    return np.sign(w) * np.clip(a - theta, 0.0, None)


def _project_pt_ball(mat: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Project onto {X : ||X^Gamma||_1 <= 1}; the partial transpose is an isometry."""
    pt = _pt_raw(mat, dims)
    w, v = np.linalg.eigh((pt + pt.conj().T) / 2)
    w = _project_l1_ball(w)
    return _pt_raw((v * w) @ v.conj().T, dims)


def _dykstra(x0, projections, max_cycles, feasibility, tol_feas):
    x = x0
    incs = [np.zeros_like(x0) for _ in projections]
    for _ in range(max_cycles):
        x_prev = x
        for i, proj in enumerate(projections):
            y = proj(x + incs[i])
            incs[i] = x + incs[i] - y
            x = y
        if np.linalg.norm(x - x_prev) <= DYKSTRA_RESIDUAL and feasibility(x) <= tol_feas:
            break
    return x


def _ppt_feasibility(mat: np.ndarray, dims: tuple[int, int]) -> float:
    lam = float(np.linalg.eigvalsh(mat)[0])
    lam_pt = float(np.linalg.eigvalsh(_pt_raw(mat, dims))[0])
    tr = float(np.trace(mat).real)
    return max(-lam, -lam_pt, abs(tr - 1.0))


def _t_feasibility(mat: np.ndarray, dims: tuple[int, int]) -> float:
    lam = float(np.linalg.eigvalsh(mat)[0])
    ptnorm = float(np.sum(np.abs(np.linalg.eigvalsh(_pt_raw(mat, dims)))))
    return max(-lam, ptnorm - 1.0)


def _project_P_raw(mat: np.ndarray, dims: tuple[int, int], config: SolverConfig) -> np.ndarray:
    n = mat.shape[0]
    projections = [
        lambda x: x - (np.trace(x).real - 1.0) / n * np.eye(n),
        lambda x: _pt_raw(_clip_psd(_pt_raw(x, dims)), dims),
        _clip_psd,
    ]
    return _dykstra(
        (mat + mat.conj().T) / 2,
        projections,
        config.dykstra_iters,
        lambda x: _ppt_feasibility(x, dims),
        config.tol_feas,
    )


def _project_T_raw(mat: np.ndarray, dims: tuple[int, int], config: SolverConfig) -> np.ndarray:
    projections = [
        lambda x: _project_pt_ball(x, dims),
        _clip_psd,
    ]
    return _dykstra(
        (mat + mat.conj().T) / 2,
        projections,
        config.dykstra_iters,
        lambda x: _t_feasibility(x, dims),
        config.tol_feas,
    )


def project_P(a: HermitianMatrix, config: SolverConfig | None = None) -> HermitianMatrix:
    """Frobenius projection onto the PPT states (Dykstra over three sets)."""
    cfg = config or SolverConfig()
    return hermitian(_project_P_raw(a.mat, a.dims, cfg), a.dims)


def project_T(a: HermitianMatrix, config: SolverConfig | None = None) -> HermitianMatrix:
    """Frobenius projection onto the Rains set (Dykstra over two sets)."""
    cfg = config or SolverConfig()
    return hermitian(_project_T_raw(a.mat, a.dims, cfg), a.dims)


def _log_divided_differences(w: np.ndarray) -> np.ndarray:
    thr = 1e-9 * float(np.max(w))
    diff = w[:, None] - w[None, :]
    close = np.abs(diff) <= thr
    mid = 2.0 / (w[:, None] + w[None, :])
    safe = np.where(close, 1.0, diff)
    quot = (np.log(w)[:, None] - np.log(w)[None, :]) / safe
    return np.where(close, mid, quot)


@dataclass(frozen=True)
class SolveResult:
    sigma_hat: HermitianMatrix
    value: float
    residual: float
    status: str  # "CONVERGED" | "NONCONVERGED"
    iterations: int
    cert_gap: float
    objective_trace: list = field(default_factory=list)


def minimize_ree(
    rho: HermitianMatrix,
    set_tag: str,
    config: SolverConfig | None = None,
    extra_candidates: list[HermitianMatrix] | None = None,
    residual_samples: int = 2000,
    start: HermitianMatrix | None = None,
) -> SolveResult:
    """Minimize S(ρ‖σ) over the PPT set ("PPT") or the Rains set ("RAINS_T").

    Projected gradient descent from the maximally mixed start with
    Barzilai-Borwein step seeds and Armijo backtracking. The reported
    residual is the largest first-order improvement Tr[φ̂(σ - σ̂)] over a
    battery of feasible directions (φ̂ = L_σ̂(ρ)); CONVERGED needs it below
    1e-6. ``cert_gap`` is a rigorous spectral upper bound on the same gap.

    For the Rains set the candidate pool always contains ρ/‖ρ^Γ‖₁, so the
    returned value never exceeds the logarithmic negativity. ``start``
    overrides the default start (it is projected onto the feasible set).
    """
    cfg = config or SolverConfig()
    if set_tag not in ("PPT", "RAINS_T"):
        raise PreconditionError(f"unknown set tag {set_tag!r}")
    if abs(rho.trace() - 1.0) > 1e-9:
        raise NotAStateError(f"rho must have unit trace (got {rho.trace():.9f})")
    if min_eigenvalue(rho) < -1e-9:
        raise NotPSDError("rho must be PSD")

    dims = rho.dims
    n = rho.n
    rho_m = rho.mat
    p_rho = np.clip(np.linalg.eigvalsh(rho_m), 0.0, None)
    p_rho = p_rho[p_rho > 1e-18]
    tr_rho_log_rho = float(np.sum(p_rho * np.log(p_rho)))

    if set_tag == "PPT":
        project = lambda x: _project_P_raw(x, dims, cfg)
    else:
        project = lambda x: _project_T_raw(x, dims, cfg)

    def evaluate(mat):
        # Extended-real objective: +inf when rho has weight where sigma has
        # none, so descent can never cross the support wall.
        w, v = np.linalg.eigh(mat)
        r = v.conj().T @ rho_m @ v
        rdiag = np.diag(r).real
        wc = np.clip(w, EIG_FLOOR, None)
        if np.any(rdiag[w < SUPPORT_ATOL] > SUPPORT_ATOL):
            return np.inf, (wc, v, r)
        f = tr_rho_log_rho - float(np.sum(rdiag * np.log(wc)))
        return f, (wc, v, r)

    def gradient(cache):
        w, v, r = cache
        t = _log_divided_differences(w)
        g = -(v @ (t * r) @ v.conj().T)
        return (g + g.conj().T) / 2

    if start is None:
        sigma = np.eye(n, dtype=complex) / n
    else:
        sigma = project(start.mat)
    f, cache = evaluate(sigma)
    g = gradient(cache)
    t = cfg.step_init / max(1.0, float(np.linalg.norm(g)))
    trace = [f]
    iterations = 0
    for k in range(cfg.max_iters):
        iterations = k + 1
        accepted = False
        tt = t
        cand = sigma
        fc = f
        while tt >= 1e-12:
            cand = project(sigma - tt * g)
            fc, cand_cache = evaluate(cand)
            decrease = float(np.vdot(g, sigma - cand).real)
            if fc <= f - 1e-4 * decrease + 1e-15:
                accepted = True
                break
            tt *= cfg.armijo_beta
        if not accepted:
            break
        s = cand - sigma
        g_new = gradient(cand_cache)
        y = g_new - g
        ss = float(np.vdot(s, s).real)
        sy = float(np.vdot(s, y).real)
        sigma, f, g = cand, fc, g_new
        trace.append(f)
        t = min(max(ss / sy, 1e-8), 1e8) if sy > 1e-18 else min(tt * 4.0, 1e8)
        if np.sqrt(ss) <= cfg.tol_grad and k >= 2:
            break

    # Best feasible candidate wins; any feasible point upper-bounds the minimum.
    candidates = [sigma]
    for cand_h in extra_candidates or []:
        candidates.append(cand_h.mat)
    if set_tag == "RAINS_T":
        ln_norm = trace_norm(partial_transpose(rho))
        candidates.append(rho_m / ln_norm)
    best = min(candidates, key=lambda m: evaluate(m)[0])
    f_best, best_cache = evaluate(best)
    sigma = best

    phi_hat = -gradient(best_cache)
    anchor = float(np.vdot(phi_hat, sigma).real)

    rng = np.random.default_rng(cfg.seed)
    if set_tag == "PPT":
        batch = sample_ppt_states(dims, residual_samples, rng)
    else:
        batch = np.concatenate(
            [
                sample_T(dims, residual_samples, rng),
                np.zeros((1, n, n), dtype=complex),
            ]
        )
    batch = np.concatenate([batch, (np.eye(n, dtype=complex) / n)[None]])
    vals = np.einsum("ij,kji->k", phi_hat, batch).real
    residual = float(np.max(vals)) - anchor

    lam_phi = float(np.linalg.eigvalsh(phi_hat)[-1])
    pt_eigs = np.linalg.eigvalsh(_pt_raw(phi_hat, dims))
    if set_tag == "PPT":
        bound = min(lam_phi, float(pt_eigs[-1]))
    else:
        bound = min(max(lam_phi, 0.0), max(float(np.max(np.abs(pt_eigs))), 0.0))
    cert_gap = bound - anchor

    sigma_h = hermitian(sigma, dims)
    value = relative_entropy(rho, sigma_h)
    status = "CONVERGED" if residual <= 1e-6 else "NONCONVERGED"
    return SolveResult(
        sigma_hat=sigma_h,
        value=value,
        residual=residual,
        status=status,
        iterations=iterations,
        cert_gap=cert_gap,
        objective_trace=trace,
    )


@dataclass(frozen=True)
class LinearSolveResult:
    sigma_hat: HermitianMatrix
    value: float
    gap: float
    status: str
    certificate: SupportingFunctional | None


def _polish_to_boundary(
    sigma: np.ndarray, m: np.ndarray, dims: tuple[int, int]
) -> np.ndarray | None:
    """Extend the ray from the maximally mixed state through σ to the PT boundary.

    Linear objectives do not decrease along that ray, so the polished point is
    an exactly-boundary anchor with at least the same value; None when the PSD
    constraint binds before the partial transpose does.
    """
    n = sigma.shape[0]
    eye = np.eye(n, dtype=complex) / n

    def spectra(t: float) -> tuple[float, float]:
        x = (1.0 - t) * eye + t * sigma
        return float(np.linalg.eigvalsh(x)[0]), float(np.linalg.eigvalsh(_pt_raw(x, dims))[0])

    lo, hi = 1.0, 1.0
    for _ in range(60):
        hi *= 1.5
        lam, lam_pt = spectra(hi)
        if lam_pt <= 0.0:
            break
        lo = hi
    else:
        return None
    for _ in range(200):
        mid = (lo + hi) / 2
        lam, lam_pt = spectra(mid)
        if lam_pt > 0.0:
            lo = mid
        else:
            hi = mid
        lam_lo, lam_pt_lo = spectra(lo)
        if 0.0 <= lam_pt_lo <= 1e-10:
            break
    lam_lo, lam_pt_lo = spectra(lo)
    if lam_lo < -1e-11 or not 0.0 <= lam_pt_lo <= 1e-10:
        return None
    return (1.0 - lo) * eye + lo * sigma


def maximize_linear(
    m: HermitianMatrix,
    config: SolverConfig | None = None,
    set_tag: str = "PPT",
) -> LinearSolveResult:
    """Maximize Tr[Mσ] over the PPT set (or over the Rains set).

    Projected ascent with a doubling/halving step on the constant gradient M.
    ``gap`` is measured against the spectral upper bound
    min(λmax(M), λmax(M^Γ)) for the PPT set (trace-norm variant for the Rains
    set), which is tight at supporting-functional optima. For the PPT set the
    anchor is polished onto the boundary and the supporting-functional
    certificate is attached when that succeeds.
    """
    cfg = config or SolverConfig()
    if set_tag not in ("PPT", "RAINS_T"):
        raise PreconditionError(f"unknown set tag {set_tag!r}")
    w_m = np.linalg.eigvalsh(m.mat)
    if w_m[0] < -1e-9 or w_m[-1] > 1.0 + 1e-9:
        raise PreconditionError("maximize_linear requires 0 <= M <= 1")

    dims = m.dims
    n = m.n
    if set_tag == "PPT":
        project = lambda x: _project_P_raw(x, dims, cfg)
        pt_eigs = np.linalg.eigvalsh(_pt_raw(m.mat, dims))
        bound = min(float(w_m[-1]), float(pt_eigs[-1]))
    else:
        project = lambda x: _project_T_raw(x, dims, cfg)
        pt_eigs = np.linalg.eigvalsh(_pt_raw(m.mat, dims))
        bound = min(max(float(w_m[-1]), 0.0), float(np.max(np.abs(pt_eigs))))

    sigma = np.eye(n, dtype=complex) / n
    value = float(np.vdot(m.mat, sigma).real)
    t = max(1.0, cfg.step_init)
    for _ in range(cfg.max_iters):
        if bound - value <= 1e-9:
            break
        cand = project(sigma + t * m.mat)
        vc = float(np.vdot(m.mat, cand).real)
        if vc > value + 1e-14:
            sigma, value = cand, vc
            t *= 2.0
        else:
            t *= 0.5
            if t < 1e-10:
                break

    certificate = None
    if set_tag == "PPT":
        polished = _polish_to_boundary(sigma, m.mat, dims)
        if polished is not None:
            vp = float(np.vdot(m.mat, polished).real)
            if vp >= value - 1e-12:
                sigma, value = polished, vp
                anchor = hermitian(sigma, dims)
                try:
                    if is_boundary_of_P(anchor):
                        certificate = ppt_functional(anchor)
                except PreconditionError:
                    certificate = None

    gap = bound - value
    status = "CONVERGED" if gap <= 1e-6 else "NONCONVERGED"
    return LinearSolveResult(
        sigma_hat=hermitian(sigma, dims),
        value=value,
        gap=gap,
        status=status,
        certificate=certificate,
    )
