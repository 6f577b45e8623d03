"""The Rains set T = {τ ⪰ 0 : ‖τ^Γ‖₁ ≤ 1} and its supporting functionals.

Supporting functionals of T at a boundary point τ* (trace-norm of the partial
transpose equal to one) are partial transposes of P₁ - P₂ + Q, where P₁ and
P₂ project onto the positive and negative eigenspaces of τ*^Γ and Q lives on
the nullspace with spectral norm at most one. A state ρ is minimized by τ*
exactly when ρ = L‡_τ*(φ) for such a φ with L‡_τ*(φ) ⪰ 0, and then

    R(ρ) = -S(ρ) - Tr[φ τ* log τ*] = S(ρ ‖ τ*).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotPSDError, PreconditionError, SupportViolationError
from .frechet import build_kernel, frechet_apply, frechet_pinv_apply, log_fn
from .linalg import (
    EIG_ZERO_RTOL,
    HermitianMatrix,
    hermitian,
    min_eigenvalue,
    partial_transpose,
    random_state,
    rank_of,
    support_projector,
    trace_inner_product,
    trace_norm,
)
from .divergences import log_negativity, von_neumann_entropy, xlogx
from .ppt import RainsCertificate, SupportingFunctional, is_ppt, sample_ppt_states


def is_in_T(tau: HermitianMatrix, tol: float = 1e-10) -> bool:
    """Membership in T: PSD within tol and ‖τ^Γ‖₁ ≤ 1 + tol."""
    if min_eigenvalue(tau) < -tol:
        return False
    return trace_norm(partial_transpose(tau)) <= 1.0 + tol


def _signed_eigenspaces(a: HermitianMatrix, tol: float | None = None):
    w, v = np.linalg.eigh(a.mat)
    if tol is None:
        tol = EIG_ZERO_RTOL * (float(np.max(np.abs(w))) if w.size else 0.0)
    pos = w > tol
    neg = w < -tol
    null = ~(pos | neg)
    return w, v, pos, neg, null


def ball_functional(
    alpha: HermitianMatrix, null_part: HermitianMatrix | None = None
) -> HermitianMatrix:
    """Supporting functional of the trace-norm unit ball at ``alpha``.

    Returns ω = P₊ - P₋ + ω₃ with P₊/P₋ the projectors onto the positive and
    negative eigenspaces of alpha and ω₃ an optional Hermitian block on the
    nullspace with spectral norm at most one (default zero). Satisfies
    Tr[ωα] = ‖α‖₁ = 1 and Tr[ωβ] ≤ 1 on the ball; unique iff alpha has no
    zero eigenvalues.
    """
    if abs(trace_norm(alpha) - 1.0) > 1e-9:
        raise PreconditionError("anchor not on the unit sphere of the trace norm")
    w, v, pos, neg, null = _signed_eigenspaces(alpha)
    sgn = np.where(pos, 1.0, np.where(neg, -1.0, 0.0))
    omega = (v * sgn) @ v.conj().T
    if null_part is not None:
        pn = (v[:, null] @ v[:, null].conj().T) if null.any() else np.zeros_like(omega)
        q = null_part.mat
        if np.linalg.norm(pn @ q @ pn - q) > 1e-10:
            raise PreconditionError("null block must be supported on the nullspace of alpha")
        if q.size and np.max(np.abs(np.linalg.eigvalsh(q))) > 1.0 + 1e-10:
            raise PreconditionError("null block must have spectral norm at most 1")
        omega = omega + q
    return hermitian(omega, alpha.dims)


def rains_functional(
    tau_star: HermitianMatrix, q: HermitianMatrix | None = None
) -> SupportingFunctional:
    """Supporting functional (P₁ - P₂ + Q)^Γ of T at a boundary anchor.

    P₁ and P₂ come from the spectral decomposition of τ*^Γ; Q defaults to
    zero on the nullspace (the canonical representative) and must satisfy
    P₁Q = P₂Q = 0 with spectral norm at most one.
    """
    if min_eigenvalue(tau_star) < -1e-10:
        raise NotPSDError("tau* must be PSD")
    tpt = partial_transpose(tau_star)
    if abs(trace_norm(tpt) - 1.0) > 1e-9:
        raise PreconditionError("anchor must satisfy ||tau*^Gamma||_1 = 1")
    w, v, pos, neg, null = _signed_eigenspaces(tpt)
    p1 = v[:, pos] @ v[:, pos].conj().T
    p2 = v[:, neg] @ v[:, neg].conj().T
    if q is None:
        q_mat = np.zeros_like(p1)
    else:
        q_mat = q.mat
        pn = (v[:, null] @ v[:, null].conj().T) if null.any() else np.zeros_like(p1)
        ok_support = np.linalg.norm(pn @ q_mat @ pn - q_mat) <= 1e-10
        ok_norm = (not q_mat.size) or np.max(np.abs(np.linalg.eigvalsh(q_mat))) <= 1.0 + 1e-10
        if not (ok_support and ok_norm):
            raise PreconditionError("Q violates support or eigenvalue bound")
    phi = partial_transpose(hermitian(p1 - p2 + q_mat, tau_star.dims))
    cert = RainsCertificate(p1=p1.copy(), p2=p2.copy(), q=q_mat.copy())
    return SupportingFunctional(phi=phi, anchor=tau_star, set_tag="RAINS_T", certificate=cert)


@dataclass(frozen=True)
class RainsConverseResult:
    """Either the state minimized by the anchor, or a named refusal."""

    tau_star: HermitianMatrix
    phi: HermitianMatrix
    rho: HermitianMatrix | None
    refusal: str | None

    @property
    def accepted(self) -> bool:
        return self.rho is not None


def rains_converse(
    tau_star: HermitianMatrix, functional: SupportingFunctional
) -> RainsConverseResult:
    """Recover the state ρ = L‡_τ*(φ) minimized by τ*, or refuse.

    Refusals: anchor off the trace-norm sphere; φ not supported inside
    supp(τ*) for singular anchors; L‡_τ*(φ) not PSD (no state is minimized by
    this hyperplane). Accepted states have unit trace and live on supp(τ*).
    """
    phi = functional.phi
    if abs(trace_norm(partial_transpose(tau_star)) - 1.0) > 1e-9:
        return RainsConverseResult(tau_star, phi, None, "tau* is not on the trace-norm sphere")
    if rank_of(tau_star) < tau_star.n:
        p = support_projector(tau_star)
        if np.linalg.norm(p.mat @ phi.mat @ p.mat - phi.mat) > 1e-9:
            return RainsConverseResult(
                tau_star, phi, None, "phi is not supported inside supp(tau*)"
            )
    kernel = build_kernel(log_fn(), tau_star)
    rho = frechet_pinv_apply(kernel, phi)
    if min_eigenvalue(rho) < -1e-10:
        return RainsConverseResult(
            tau_star, phi, None, "L‡(phi) not PSD — no state minimized here"
        )
    if abs(rho.trace() - 1.0) > 1e-9:
        return RainsConverseResult(
            tau_star, phi, None, f"recovered matrix has trace {rho.trace():.12f}"
        )
    return RainsConverseResult(tau_star, phi, rho, None)


def sample_T(dims: tuple[int, int], count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` elements of T, shape (count, n, n).

    Random Hermitian matrices are projected onto the PSD cone, then rescaled
    so the trace norm of the partial transpose is uniform in [0, 1]; the batch
    covers the interior and the boundary sphere.
    """
    n1, n2 = dims
    n = n1 * n2
    g = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    h = (g + g.conj().transpose(0, 2, 1)) / 2
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    psd = np.einsum("kij,kj,klj->kil", v, w, v.conj())
    pt = psd.reshape(count, n1, n2, n1, n2).transpose(0, 1, 4, 3, 2).reshape(count, n, n)
    norms = np.sum(np.abs(np.linalg.eigvalsh(pt)), axis=1)
    norms = np.where(norms > 1e-14, norms, 1.0)
    u = rng.uniform(size=count)
    return psd * (u / norms)[:, None, None]


@dataclass(frozen=True)
class RainsMinCertificate:
    """Outcome of checking that τ* minimizes the Rains bound for ρ."""

    passed: bool
    norm_ok: bool
    form_ok: bool
    battery_ok: bool
    phi_hat: HermitianMatrix
    anchor_value: float
    max_violation: float
    samples: int


def verify_rains_min(
    rho: HermitianMatrix,
    tau_star: HermitianMatrix,
    samples: int = 10_000,
    seed: int = 0,
    form_tol: float = 1e-7,
    battery_tol: float = 1e-8,
) -> RainsMinCertificate:
    """Check the Rains minimization criterion Tr[L_τ*(ρ) τ] ≤ 1 over T.

    Requires ‖τ*^Γ‖₁ = 1; the induced functional φ̂ = L_τ*(ρ) must match the
    projector-pair certificate form in the eigenbasis of τ*^Γ (identity on the
    positive eigenspace, minus identity on the negative one, a contraction on
    the nullspace, no cross terms), and a sampled battery over T must respect
    the inequality.
    """
    if abs(rho.trace() - 1.0) > 1e-9 or min_eigenvalue(rho) < -1e-9:
        raise PreconditionError("rho must be a unit-trace PSD state")
    p = support_projector(tau_star)
    if rho.trace() - trace_inner_product(rho, p) > 1e-9:
        raise SupportViolationError("rho has weight outside supp(tau*)")

    tpt = partial_transpose(tau_star)
    norm_ok = abs(trace_norm(tpt) - 1.0) <= 1e-8

    kernel = build_kernel(log_fn(), tau_star)
    phi_hat = frechet_apply(kernel, rho)
    anchor_value = trace_inner_product(phi_hat, tau_star)

    w, v, pos, neg, null = _signed_eigenspaces(tpt)
    b = v.conj().T @ partial_transpose(phi_hat).mat @ v
    form_ok = True
    npos, nneg = int(pos.sum()), int(neg.sum())
    if npos and np.linalg.norm(b[np.ix_(pos, pos)] - np.eye(npos)) > form_tol:
        form_ok = False
    if nneg and np.linalg.norm(b[np.ix_(neg, neg)] + np.eye(nneg)) > form_tol:
        form_ok = False
    for rows, cols in ((pos, neg), (pos, null), (neg, null)):
        if rows.any() and cols.any() and np.linalg.norm(b[np.ix_(rows, cols)]) > form_tol:
            form_ok = False
    if null.any():
        q_block = b[np.ix_(null, null)]
        if np.max(np.abs(np.linalg.eigvalsh((q_block + q_block.conj().T) / 2))) > 1.0 + form_tol:
            form_ok = False

    rng = np.random.default_rng(seed)
    batches = [
        sample_T(tau_star.dims, samples, rng),
        sample_ppt_states(tau_star.dims, max(64, samples // 16), rng),
        tau_star.mat[None, :, :],
        np.zeros((1, tau_star.n, tau_star.n), dtype=complex),
    ]
    max_violation = -np.inf
    for batch in batches:
        vals = np.einsum("ij,kji->k", phi_hat.mat, batch).real
        max_violation = max(max_violation, float(np.max(vals)) - anchor_value)
    battery_ok = max_violation <= battery_tol

    return RainsMinCertificate(
        passed=bool(norm_ok and form_ok and battery_ok),
        norm_ok=bool(norm_ok),
        form_ok=bool(form_ok),
        battery_ok=bool(battery_ok),
        phi_hat=phi_hat,
        anchor_value=anchor_value,
        max_violation=max_violation,
        samples=samples,
    )


def rains_closed_form(
    tau_star: HermitianMatrix,
    functional: SupportingFunctional,
    rho: HermitianMatrix,
) -> float:
    """Closed-form Rains bound R(ρ) = -S(ρ) - Tr[φ τ* log τ*].

    Valid when τ* minimizes the Rains bound for ρ with supporting functional
    φ (verify with ``verify_rains_min``); then it equals S(ρ ‖ τ*).
    """
    if abs(trace_norm(partial_transpose(tau_star)) - 1.0) > 1e-8:
        raise PreconditionError("anchor must satisfy ||tau*^Gamma||_1 = 1")
    return -von_neumann_entropy(rho) - trace_inner_product(functional.phi, xlogx(tau_star))


@dataclass(frozen=True)
class RainsLnReport:
    """Comparison of the Rains bound against the logarithmic negativity."""

    verdict: str  # "EQUAL" or "STRICT"
    max_support_overlap: float  # max over T of Tr[P_rho tau]
    anchor_overlap: float  # Tr[P_rho tau*] with tau* = rho / ||rho^Gamma||_1
    log_negativity: float
    rho_full_rank: bool
    rho_ppt: bool
    rains_if_equal: float | None


def rains_vs_ln(rho: HermitianMatrix, config=None) -> RainsLnReport:
    """Decide whether R(ρ) equals the logarithmic negativity of ρ.

    Equality holds iff the candidate minimizer τ* = ρ/‖ρ^Γ‖₁ attains the
    maximum of Tr[P_ρ τ] over T, whose value at τ* is 1/‖ρ^Γ‖₁. The
    maximization runs on the forward solver. Full-rank non-PPT states are
    always strict: there Tr[P_ρ τ] = Tr[τ] is maximized by PPT states at 1,
    above the anchor overlap.
    """
    from .solver import SolverConfig, maximize_linear

    if config is None:
        config = SolverConfig()
    p_rho = support_projector(rho)
    res = maximize_linear(p_rho, config, set_tag="RAINS_T")
    m = res.value
    anchor_overlap = 1.0 / trace_norm(partial_transpose(rho))
    ln = log_negativity(rho)
    full_rank = rank_of(rho) == rho.n
    ppt = is_ppt(rho)
    equal = m <= anchor_overlap + 1e-6
    return RainsLnReport(
        verdict="EQUAL" if equal else "STRICT",
        max_support_overlap=m,
        anchor_overlap=anchor_overlap,
        log_negativity=ln,
        rho_full_rank=full_rank,
        rho_ppt=ppt,
        rains_if_equal=ln if equal else None,
    )


@dataclass(frozen=True)
class QubitEqualityReport:
    """Forward-solved Rains bound vs REE over random non-PPT states."""

    dims: tuple[int, int]
    seed: int
    ree_values: list = field(default_factory=list)
    rains_values: list = field(default_factory=list)
    ln_values: list = field(default_factory=list)
    max_gap: float = 0.0
    passed: bool | None = None  # None when no subsystem is a qubit (report only)


def qubit_equality_audit(
    dims: tuple[int, int], samples: int, seed: int, config=None
) -> QubitEqualityReport:
    """Compare forward-solved R and E over random non-PPT states.

    With one qubit subsystem the two must agree; other dimensions are audited
    report-only with no pass bar.
    """
    from .solver import SolverConfig, minimize_ree

    if config is None:
        config = SolverConfig()
    rng = np.random.default_rng(seed)
    ree_vals: list[float] = []
    rains_vals: list[float] = []
    ln_vals: list[float] = []
    count = 0
    while count < samples:
        rho = random_state(dims, rng)
        if is_ppt(rho):
            continue
        count += 1
        ep = minimize_ree(rho, "PPT", config)
        rb = minimize_ree(rho, "RAINS_T", config, extra_candidates=[ep.sigma_hat])
        ree_vals.append(ep.value)
        rains_vals.append(rb.value)
        ln_vals.append(log_negativity(rho))
    gaps = [abs(r - e) for r, e in zip(rains_vals, ree_vals)]
    max_gap = max(gaps) if gaps else 0.0
    qubit_side = min(dims) == 2
    return QubitEqualityReport(
        dims=dims,
        seed=seed,
        ree_values=ree_vals,
        rains_values=rains_vals,
        ln_values=ln_vals,
        max_gap=max_gap,
        passed=(max_gap < 5e-4) if qubit_side else None,
    )
