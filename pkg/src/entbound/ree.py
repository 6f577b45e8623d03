"""Converse relative-entropy-of-entanglement problem.

Given a boundary state σ* of the PPT set and a supporting functional φ
anchored there, every state of the family

    ρ(x) = (1 - x) σ* + x L‡_σ*(φ),    x in (0, x_max],

has σ* as its closest PPT state (for singular σ* the statement is sufficient
only and x_max is capped at 1). The relative entropy of entanglement of a
family member then has the closed form

    E(ρ(x)) = -S(ρ(x)) - Tr[φ(x) σ* log σ*],  φ(x) = (1 - x) P_σ* + x φ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SupportViolationError
from .frechet import build_kernel, frechet_apply, frechet_pinv_apply, log_fn
from .linalg import (
    HermitianMatrix,
    frobenius_norm,
    hermitian,
    partial_transpose,
    rank_of,
    support_projector,
    to_json_dict,
    trace_inner_product,
)
from .divergences import SUPPORT_ATOL, von_neumann_entropy, xlogx
from .ppt import (
    SupportingFunctional,
    functional_from_json_dict,
    functional_to_json_dict,
    pt_zero_subspace,
    sample_ppt_states,
    sample_pure_products_2x2,
)

X_MAX_CAP = 1e6
_PSD_BISECT_TOL = 1e-11


@dataclass(frozen=True)
class StateFamily:
    """Family ρ(x) = (1-x) σ* + x direction with σ* as closest PPT state."""

    sigma_star: HermitianMatrix
    functional: SupportingFunctional
    direction: HermitianMatrix  # L‡_σ*(φ)
    x_max: float
    singular_cap_applied: bool
    direction_psd: bool

    def state(self, x: float) -> HermitianMatrix:
        return hermitian(
            (1.0 - x) * self.sigma_star.mat + x * self.direction.mat,
            self.sigma_star.dims,
        )


def family_to_json_dict(fam: StateFamily) -> dict:
    return {
        "sigma_star": to_json_dict(fam.sigma_star),
        "phi": functional_to_json_dict(fam.functional),
        "x_max": fam.x_max,
        "singular_cap_applied": fam.singular_cap_applied,
    }


def family_from_json_dict(d: dict) -> StateFamily:
    functional = functional_from_json_dict(d["phi"])
    return build_family(functional.anchor, functional)


def _check_anchored(sigma_star: HermitianMatrix, functional: SupportingFunctional) -> None:
    if functional.anchor.dims != sigma_star.dims or (
        frobenius_norm(functional.anchor - sigma_star) > 1e-9
    ):
        raise PreconditionError("functional is anchored elsewhere")


def build_family(
    sigma_star: HermitianMatrix, functional: SupportingFunctional
) -> StateFamily:
    """Construct the family of states minimized by σ*.

    The direction is L‡_σ*(φ); x_max is located by doubling then bisection on
    the smallest eigenvalue of ρ(x) (the PSD segment through σ* is an
    interval). A singular anchor requires φ supported inside supp σ* and caps
    x_max at 1.
    """
    _check_anchored(sigma_star, functional)
    if functional.set_tag != "PPT":
        raise PreconditionError("family construction needs a PPT-set functional")

    n = sigma_star.n
    full_rank = rank_of(sigma_star) == n
    phi = functional.phi
    if not full_rank:
        p = support_projector(sigma_star)
        compressed = p.mat @ phi.mat @ p.mat
        if np.linalg.norm(compressed - phi.mat) > 1e-9:
            raise SupportViolationError(
                "singular anchor requires phi supported inside supp(sigma*)"
            )

    kernel = build_kernel(log_fn(), sigma_star)
    direction = frechet_pinv_apply(kernel, phi)
    direction_psd = float(np.linalg.eigvalsh(direction.mat)[0]) >= -1e-10

    def min_eig(x: float) -> float:
        m = (1.0 - x) * sigma_star.mat + x * direction.mat
        return float(np.linalg.eigvalsh(m)[0])

    hi = 1.0
    while min_eig(hi) >= -_PSD_BISECT_TOL and hi < X_MAX_CAP:
        hi *= 2.0
    if min_eig(hi) >= -_PSD_BISECT_TOL:
        x_max = float(hi)
    else:
        lo = 0.0
        for _ in range(100):
            mid = (lo + hi) / 2
            if min_eig(mid) >= -_PSD_BISECT_TOL:
                lo = mid
            else:
                hi = mid
        x_max = lo
    if x_max <= 0.0:
        raise PreconditionError("family is empty: rho(x) leaves the PSD cone immediately")

    cap_applied = not full_rank
    if cap_applied:
        x_max = min(1.0, x_max)

    fam = StateFamily(
        sigma_star=sigma_star,
        functional=functional,
        direction=direction,
        x_max=x_max,
        singular_cap_applied=cap_applied,
        direction_psd=direction_psd,
    )
    for x in (0.0, x_max / 2, x_max):
        rho_x = fam.state(x)
        if abs(rho_x.trace() - 1.0) > 1e-9:
            raise PreconditionError(f"trace broke along the family at x={x}")
        if float(np.linalg.eigvalsh(rho_x.mat)[0]) < -1e-9:
            raise PreconditionError(f"rho(x) not PSD at x={x}")
    return fam


def ree_closed_form(family: StateFamily, x: float) -> float:
    """Closed-form E(ρ(x)) = -S(ρ(x)) - Tr[φ(x) σ* log σ*].

    φ(x) = (1-x)·1 + x·φ, with the identity replaced by P_σ* on singular
    anchors since everything lives on the support there.
    """
    if not 0.0 < x <= family.x_max + 1e-12:
        raise PreconditionError(f"x={x} outside (0, x_max={family.x_max}]")
    rho_x = family.state(x)
    p = support_projector(family.sigma_star)
    phi_x = hermitian(
        (1.0 - x) * p.mat + x * family.functional.phi.mat, family.sigma_star.dims
    )
    return -von_neumann_entropy(rho_x) - trace_inner_product(
        phi_x, xlogx(family.sigma_star)
    )


@dataclass(frozen=True)
class CpsCertificate:
    """Outcome of checking that σ* minimizes relative entropy for ρ."""

    passed: bool
    phi_hat: HermitianMatrix
    anchor_value: float
    max_violation: float
    violator: HermitianMatrix | None
    form_matched: bool
    form_coefficients: np.ndarray | None
    anchor_singular: bool
    samples: int


def verify_cps(
    rho: HermitianMatrix,
    sigma_star: HermitianMatrix,
    samples: int = 10_000,
    seed: int = 0,
    tol: float = 1e-8,
) -> CpsCertificate:
    """Check the minimization criterion Tr[φ̂σ] ≤ Tr[φ̂σ*] with φ̂ = L_σ*(ρ).

    The verification battery combines the structural certificate (φ̂ matches
    the PPT hyperplane form: 1 - φ̂ has a PSD partial transpose supported on
    the zero eigenspace of σ*^Γ), random PPT samples, and for dims (2, 2) a
    coarse grid of pure product states. For a singular anchor the criterion
    is sufficient only.
    """
    p = support_projector(sigma_star)
    outside = rho.trace() - trace_inner_product(rho, p)
    if outside > SUPPORT_ATOL:
        raise SupportViolationError("not in domain: rho has weight outside supp(sigma*)")

    n = sigma_star.n
    anchor_singular = rank_of(sigma_star) < n
    kernel = build_kernel(log_fn(), sigma_star)
    phi_hat = frechet_apply(kernel, rho)
    anchor_value = trace_inner_product(phi_hat, sigma_star)

    # Structural match against the PPT hyperplane form (full-rank anchors).
    form_matched = False
    form_coefficients = None
    if not anchor_singular:
        delta = hermitian(np.eye(n) - phi_hat.mat, sigma_star.dims)
        delta_pt = partial_transpose(delta)
        zero_vecs = pt_zero_subspace(sigma_star)
        if zero_vecs.size:
            pz = zero_vecs @ zero_vecs.conj().T
            supported = np.linalg.norm(pz @ delta_pt.mat @ pz - delta_pt.mat) <= 1e-7
            w = np.linalg.eigvalsh(delta_pt.mat)
            psd = w[0] >= -1e-9
            if supported and psd:
                form_matched = True
                comp = zero_vecs.conj().T @ delta_pt.mat @ zero_vecs
                form_coefficients = np.linalg.eigvalsh((comp + comp.conj().T) / 2)

    rng = np.random.default_rng(seed)
    batteries = [sample_ppt_states(sigma_star.dims, samples, rng)]
    if sigma_star.dims == (2, 2):
        batteries.append(sample_pure_products_2x2())
    batteries.append(np.eye(n)[None, :, :] / n)

    max_violation = -np.inf
    violator = None
    for batch in batteries:
        vals = np.einsum("ij,kji->k", phi_hat.mat, batch).real
        k = int(np.argmax(vals))
        violation = float(vals[k]) - anchor_value
        if violation > max_violation:
            max_violation = violation
            if violation > tol:
                violator = hermitian(batch[k], sigma_star.dims)
    passed = max_violation <= tol
    return CpsCertificate(
        passed=passed,
        phi_hat=phi_hat,
        anchor_value=anchor_value,
        max_violation=max_violation,
        violator=violator,
        form_matched=form_matched,
        form_coefficients=form_coefficients,
        anchor_singular=anchor_singular,
        samples=samples,
    )


@dataclass(frozen=True)
class AdditivityReport:
    """Residuals of the two sufficient conditions for weak additivity."""

    commutator_norm: float
    condition_two_available: bool
    max_eig_minus_one: float | None
    min_eig_minus_one: float | None
    passed: bool


def additivity_check(
    sigma_star: HermitianMatrix,
    functional: SupportingFunctional,
    tol: float = 1e-8,
) -> AdditivityReport:
    """Report the commuting-pair sufficient conditions for weak additivity.

    Condition (i): [φ, σ*] = 0, reported as the Frobenius norm of the
    commutator. Condition (ii): (L‡_σ*(φ) σ*⁻¹)^Γ ⪯ 1, reported through the
    extreme eigenvalues of the Hermitian part of that matrix minus one (it is
    exactly Hermitian in the commuting case the condition is meant for).
    Condition (ii) needs a full-rank anchor; the report says when it is
    unavailable. PASS requires both residuals within ``tol``.
    """
    _check_anchored(sigma_star, functional)
    phi = functional.phi
    comm = np.linalg.norm(phi.mat @ sigma_star.mat - sigma_star.mat @ phi.mat)

    full_rank = rank_of(sigma_star) == sigma_star.n
    if not full_rank:
        return AdditivityReport(
            commutator_norm=float(comm),
            condition_two_available=False,
            max_eig_minus_one=None,
            min_eig_minus_one=None,
            passed=False,
        )

    kernel = build_kernel(log_fn(), sigma_star)
    direction = frechet_pinv_apply(kernel, phi)
    sigma_inv = np.linalg.inv(sigma_star.mat)
    prod = direction.mat @ sigma_inv
    prod_h = hermitian((prod + prod.conj().T) / 2, sigma_star.dims)
    w = np.linalg.eigvalsh(partial_transpose(prod_h).mat)
    max_minus = float(w[-1] - 1.0)
    min_minus = float(w[0] - 1.0)
    passed = comm <= tol and max_minus <= tol
    return AdditivityReport(
        commutator_norm=float(comm),
        condition_two_available=True,
        max_eig_minus_one=max_minus,
        min_eig_minus_one=min_minus,
        passed=passed,
    )
