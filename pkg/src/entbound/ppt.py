"""The convex set of PPT states: membership, boundary, supporting functionals.

A state σ* on the boundary of the PPT set (its partial transpose has a zero
eigenvector) supports hyperplanes of the form

    φ = 1 - Σ_i a_i (|φ_i⟩⟨φ_i|)^Γ,   a_i ≥ 0,

where |φ_i⟩ runs over the zero eigenvectors of σ*^Γ. Then Tr[φσ] ≤ 1 for all
PPT σ with equality at σ*, and the coefficients are rescaled so that
Tr[(P_σ* - φ)²] = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotPSDError, PreconditionError
from .linalg import (
    EIG_ZERO_RTOL,
    HermitianMatrix,
    from_json_dict,
    hermitian,
    identity,
    partial_transpose,
    random_state,
    support_projector,
    to_json_dict,
    trace_inner_product,
)


@dataclass(frozen=True)
class PPTCertificate:
    """Nonnegative coefficients paired with zero eigenvectors of anchor^Γ."""

    coefficients: np.ndarray  # (m,) floats, ≥ 0, rescaled for normalization
    zero_eigenvectors: np.ndarray  # (n, m) columns

    def __post_init__(self) -> None:
        self.coefficients.setflags(write=False)
        self.zero_eigenvectors.setflags(write=False)


@dataclass(frozen=True)
class RainsCertificate:
    """Projector pair covering the ±eigenspaces of anchor^Γ plus a null block."""

    p1: np.ndarray
    p2: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        self.p1.setflags(write=False)
        self.p2.setflags(write=False)
        self.q.setflags(write=False)


@dataclass(frozen=True)
class SupportingFunctional:
    """Matrix φ with a certificate of why it supports a convex set at an anchor."""

    phi: HermitianMatrix
    anchor: HermitianMatrix
    set_tag: str  # "PPT" or "RAINS_T"
    certificate: PPTCertificate | RainsCertificate

    def __post_init__(self) -> None:
        if self.set_tag not in ("PPT", "RAINS_T"):
            raise PreconditionError(f"unknown set tag {self.set_tag!r}")
        anchor_value = trace_inner_product(self.phi, self.anchor)
        if abs(anchor_value - 1.0) > 1e-9:
            raise PreconditionError(
                f"anchor equality violated: Tr[phi anchor] = {anchor_value:.12f}"
            )
        if isinstance(self.certificate, PPTCertificate):
            a = self.certificate.coefficients
            if np.any(a < -1e-15):
                raise PreconditionError("PPT certificate coefficients must be nonnegative")
            apt = partial_transpose(self.anchor).mat
            for k in range(self.certificate.zero_eigenvectors.shape[1]):
                vec = self.certificate.zero_eigenvectors[:, k]
                if np.linalg.norm(apt @ vec) > 1e-8:
                    raise PreconditionError(
                        "certificate vector is not a zero eigenvector of anchor^Γ"
                    )
        else:
            p1, p2, q = self.certificate.p1, self.certificate.p2, self.certificate.q
            if np.linalg.norm(p1 @ p2) > 1e-10:
                raise PreconditionError("P1 and P2 must be disjoint projectors")
            if np.linalg.norm(p1 @ q) > 1e-10 or np.linalg.norm(p2 @ q) > 1e-10:
                raise PreconditionError("Q must live on the nullspace of anchor^Γ")
            if q.size and np.max(np.abs(np.linalg.eigvalsh(q))) > 1.0 + 1e-10:
                raise PreconditionError("Q must have spectral norm at most 1")

    @property
    def anchor_value(self) -> float:
        return trace_inner_product(self.phi, self.anchor)


def functional_to_json_dict(f: SupportingFunctional) -> dict:
    if isinstance(f.certificate, PPTCertificate):
        cert = {
            "a": f.certificate.coefficients.tolist(),
            "zero_eigenvectors_re": f.certificate.zero_eigenvectors.real.tolist(),
            "zero_eigenvectors_im": f.certificate.zero_eigenvectors.imag.tolist(),
        }
    else:
        cert = {
            "p1": to_json_dict(hermitian(f.certificate.p1, f.anchor.dims)),
            "p2": to_json_dict(hermitian(f.certificate.p2, f.anchor.dims)),
            "q": to_json_dict(hermitian(f.certificate.q, f.anchor.dims)),
        }
    return {
        "phi": to_json_dict(f.phi),
        "anchor": to_json_dict(f.anchor),
        "set": f.set_tag,
        "certificate": cert,
    }


def functional_from_json_dict(d: dict) -> SupportingFunctional:
    try:
        phi = from_json_dict(d["phi"])
        anchor = from_json_dict(d["anchor"])
        tag = d["set"]
        cert_d = d["certificate"]
        if tag == "PPT":
            cert = PPTCertificate(
                coefficients=np.asarray(cert_d["a"], dtype=float),
                zero_eigenvectors=np.asarray(cert_d["zero_eigenvectors_re"], dtype=float)
                + 1j * np.asarray(cert_d["zero_eigenvectors_im"], dtype=float),
            )
        else:
            cert = RainsCertificate(
                p1=from_json_dict(cert_d["p1"]).mat.copy(),
                p2=from_json_dict(cert_d["p2"]).mat.copy(),
                q=from_json_dict(cert_d["q"]).mat.copy(),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatchError(f"malformed functional object: {exc}") from exc
    return SupportingFunctional(phi=phi, anchor=anchor, set_tag=tag, certificate=cert)


def _pt_rel_tol(sigma: HermitianMatrix) -> float:
    w = np.abs(np.linalg.eigvalsh(partial_transpose(sigma).mat))
    return EIG_ZERO_RTOL * (float(np.max(w)) if w.size else 0.0)


def is_ppt(sigma: HermitianMatrix, tol: float | None = None) -> bool:
    """True iff the partial transpose of the state is PSD within ``tol``."""
    w = np.linalg.eigvalsh(sigma.mat)
    if w[0] < -1e-9 * max(1.0, float(np.max(np.abs(w)))):
        raise NotPSDError(f"is_ppt requires a PSD input (min eig {w[0]:.3e})")
    if abs(sigma.trace() - 1.0) > 1e-9:
        raise PreconditionError(f"is_ppt requires unit trace (got {sigma.trace():.9f})")
    if tol is None:
        tol = _pt_rel_tol(sigma)
    return float(np.linalg.eigvalsh(partial_transpose(sigma).mat)[0]) >= -tol


def is_boundary_of_P(sigma: HermitianMatrix, tol: float | None = None) -> bool:
    """True iff σ is PPT and σ^Γ has a zero eigenvalue within ``tol``."""
    if tol is None:
        tol = _pt_rel_tol(sigma)
    if not is_ppt(sigma, tol):
        raise PreconditionError("boundary test requires a PPT state")
    return float(np.linalg.eigvalsh(partial_transpose(sigma).mat)[0]) <= tol


def pt_zero_subspace(
    sigma_star: HermitianMatrix, tol: float | None = None
) -> np.ndarray:
    """Columns spanning the zero eigenspace of σ*^Γ (relative threshold)."""
    w, v = np.linalg.eigh(partial_transpose(sigma_star).mat)
    if tol is None:
        tol = EIG_ZERO_RTOL * (float(np.max(np.abs(w))) if w.size else 0.0)
    return v[:, np.abs(w) <= tol]


def ppt_functional(
    sigma_star: HermitianMatrix,
    coefficients: np.ndarray | None = None,
    tol: float | None = None,
) -> SupportingFunctional:
    """Supporting functional of the PPT set anchored at a boundary state.

    φ = 1 - Σ a_i (|φ_i⟩⟨φ_i|)^Γ over the zero eigenvectors of σ*^Γ, with the
    coefficient vector rescaled so Tr[(P_σ* - φ)²] = 1. ``coefficients``
    defaults to all ones; only its direction matters.
    """
    if not is_boundary_of_P(sigma_star, tol):
        raise PreconditionError("anchor is not on the boundary of the PPT set")
    vecs = pt_zero_subspace(sigma_star, tol)
    m = vecs.shape[1]
    if coefficients is None:
        a = np.ones(m)
    else:
        a = np.asarray(coefficients, dtype=float)
    if a.shape != (m,):
        raise PreconditionError(
            f"expected {m} coefficients (zero-eigenvalue multiplicity), got {a.shape}"
        )
    if np.any(a < 0):
        raise PreconditionError("coefficients must be nonnegative")
    if not np.any(a > 0):
        raise PreconditionError("zero coefficient vector")

    n = sigma_star.n
    w = np.zeros((n, n), dtype=complex)
    for i in range(m):
        if a[i] > 0:
            proj = np.outer(vecs[:, i], vecs[:, i].conj())
            w += a[i] * partial_transpose(hermitian(proj, sigma_star.dims)).mat
    w_h = hermitian(w, sigma_star.dims)

    p = support_projector(sigma_star)
    eye = np.eye(n)
    q_def = float(np.trace(eye - p.mat).real)  # Tr[(1-P)²] = corank
    pw = float(np.trace((eye - p.mat) @ w_h.mat).real)
    w2 = trace_inner_product(w_h, w_h)
    disc = pw * pw - w2 * (q_def - 1.0)
    if disc < 0:
        raise PreconditionError(
            "normalization Tr[(P - phi)^2] = 1 unreachable for this anchor/coefficients"
        )
    c = (pw + float(np.sqrt(disc))) / w2
    if c <= 0:
        raise PreconditionError("normalization requires a positive rescaling")

    phi = hermitian(eye - c * w_h.mat, sigma_star.dims)
    cert = PPTCertificate(coefficients=c * a, zero_eigenvectors=vecs.copy())
    return SupportingFunctional(phi=phi, anchor=sigma_star, set_tag="PPT", certificate=cert)


def random_boundary_state(dims: tuple[int, int], seed: int) -> HermitianMatrix:
    """PPT state whose partial transpose has minimum eigenvalue in [0, 1e-10].

    Samples a full-rank state with strictly positive partial transpose and a
    non-PPT direction, then bisects along the segment until the PT spectrum
    touches zero from above. Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    n = dims[0] * dims[1]

    def pt_min_eig(mat: np.ndarray) -> float:
        h = hermitian(mat, dims)
        return float(np.linalg.eigvalsh(partial_transpose(h).mat)[0])

    eye = np.eye(n) / n
    sigma0 = None
    for _ in range(200):
        cand = random_state(dims, rng).mat
        mix = 0.0
        while mix <= 1.0:
            trial = (1.0 - mix) * cand + mix * eye
            if pt_min_eig(trial) > 1e-3 / n:
                sigma0 = trial
                break
            mix += 0.1
        if sigma0 is not None:
            break
    if sigma0 is None:
        raise PreconditionError("failed to sample an interior PPT start")

    rho1 = None
    for _ in range(1000):
        cand = random_state(dims, rng).mat
        if pt_min_eig(cand) < -1e-6:
            rho1 = cand
            break
    if rho1 is None:
        raise PreconditionError("failed to sample a non-PPT direction")

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if pt_min_eig((1.0 - mid) * sigma0 + mid * rho1) > 0.0:
            lo = mid
        else:
            hi = mid
        if pt_min_eig((1.0 - lo) * sigma0 + lo * rho1) <= 1e-10 and lo > 0.0:
            break
    out = (1.0 - lo) * sigma0 + lo * rho1
    m = pt_min_eig(out)
    if not 0.0 <= m <= 1e-10:
        raise PreconditionError(f"bisection did not reach the boundary (min PT eig {m:.3e})")
    return hermitian(out, dims)


def sample_ppt_states(
    dims: tuple[int, int], count: int, rng: np.random.Generator
) -> np.ndarray:
    """Stack of ``count`` PPT states, shape (count, n, n).

    Each sample mixes a Ginibre state toward the maximally mixed state by a
    uniformly random amount past the exact PPT-boundary mixing weight, so the
    batch covers boundary and interior.
    """
    n1, n2 = dims
    n = n1 * n2
    g = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    s = g @ g.conj().transpose(0, 2, 1)
    s /= np.trace(s, axis1=1, axis2=2).real[:, None, None]
    s = (s + s.conj().transpose(0, 2, 1)) / 2
    spt = s.reshape(count, n1, n2, n1, n2).transpose(0, 1, 4, 3, 2).reshape(count, n, n)
    lam = np.linalg.eigvalsh(spt)[:, 0]
    tstar = np.where(lam < 0.0, -lam / (1.0 / n - lam), 0.0)
    t = tstar + rng.uniform(size=count) * (1.0 - tstar)
    eye = np.eye(n) / n
    out = (1.0 - t)[:, None, None] * s + t[:, None, None] * eye[None, :, :]
    return out


def sample_pure_products_2x2(points: int = 6) -> np.ndarray:
    """Coarse grid of pure product states |a⟩⟨a| ⊗ |b⟩⟨b| for dims (2, 2)."""
    thetas = np.linspace(0.0, np.pi, points)
    phis = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    kets = []
    for th in thetas:
        for ph in phis:
            kets.append(np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)]))
    states = []
    for a in kets:
        for b in kets:
            v = np.kron(a, b)
            states.append(np.outer(v, v.conj()))
    return np.asarray(states)


def ppt_identity_state(dims: tuple[int, int]) -> HermitianMatrix:
    return identity(dims) * (1.0 / (dims[0] * dims[1]))
