"""Rate-profile solvers for non-reciprocal channels.

The boundary of the rate region is traced one rate profile at a time: fix the
split ``(kappa, 1 - kappa)`` of the sum rate, then bisect on the sum rate. Each
bisection step asks a semidefinite program whether the implied SNR pair is
supportable, via minimum relay power under a sum budget or via max-slack
feasibility under per-relay caps. Sum-power solutions admit an exact rank-one
reduction; individual-power solutions use randomized rank-one extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError
from .model import (
    Beamformer,
    ChannelSet,
    IndividualPower,
    PowerBudget,
    RatePair,
    SumPower,
    SystemParams,
    noise_matrices,
    rate_pair,
)
from .sdp import (
    FEASIBILITY,
    SdpProblem,
    SdpSolution,
    SdpStatus,
    solve_feasibility,
    solve_min_trace,
)

# Rate-to-SNR exponents beyond this are astronomically infeasible and only
# risk overflow, so the targets are reported as unreachable outright.
_MAX_RATE_EXPONENT = 50.0


@dataclass(frozen=True)
class RateProfile:
    """Split of the sum rate between the two directions."""

    kappa: float

    def __post_init__(self) -> None:
        kappa = float(self.kappa)
        if not np.isfinite(kappa) or not 0.0 <= kappa <= 1.0:
            raise DomainError("kappa must lie in [0, 1]")
        object.__setattr__(self, "kappa", kappa)

    @property
    def kappa_bar(self) -> float:
        return 1.0 - self.kappa


@dataclass(frozen=True)
class BisectionConfig:
    """Stopping controls for the sum-rate bisection."""

    epsilon: float = 1e-4
    max_iters: int = 60
    r_max: float | None = None

    def __post_init__(self) -> None:
        if not self.epsilon > 0.0:
            raise DomainError("epsilon must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")
        if self.r_max is not None and not self.r_max > 0.0:
            raise DomainError("r_max override must be positive")


@dataclass(frozen=True)
class ExactReduction:
    """Provenance tag for the null-space rank-one reduction.

    ``fallback`` marks the rare dominant-eigenvector escape hatch; the exact
    path leaves it False.
    """

    fallback: bool = False


@dataclass(frozen=True)
class Randomization:
    """Provenance tag for randomized extraction: candidate count and the
    violation value of the selected candidate (nonpositive means both SNR
    targets are met)."""

    num_candidates: int
    best_violation: float


@dataclass(frozen=True)
class RankOneResult:
    """A beamformer recovered from a PSD solution, with its achieved rates."""

    w: Beamformer
    rates: RatePair
    source: ExactReduction | Randomization


def _as_profile(kappa: float | RateProfile) -> RateProfile:
    return kappa if isinstance(kappa, RateProfile) else RateProfile(kappa)


def profile_rate(rates: RatePair, kappa: float | RateProfile) -> float:
    """Largest sum rate the pair supports at the given profile.

    Returns sup{R : r1 >= kappa R and r2 >= (1-kappa) R}; the value a
    beamformer contributes toward a rate-profile target, which never exceeds
    the relaxed optimum even when the raw sum r1 + r2 does.
    """
    profile = _as_profile(kappa)
    supported = np.inf
    if profile.kappa > 0.0:
        supported = min(supported, rates.r1 / profile.kappa)
    if profile.kappa_bar > 0.0:
        supported = min(supported, rates.r2 / profile.kappa_bar)
    return supported


def snr_targets(kappa: float | RateProfile, r: float) -> tuple[float, float]:
    """SNR thresholds implied by splitting sum rate ``r`` as (kappa, 1-kappa).

    Returns ``(gamma1, gamma2)``; a target whose exponent exceeds the desk
    scale comes back as ``inf`` and should be treated as unreachable.
    """
    profile = _as_profile(kappa)
    if not np.isfinite(r) or r < 0.0:
        raise DomainError("rate r must be finite and nonnegative")

    def gamma(split: float) -> float:
        if split * r > _MAX_RATE_EXPONENT:
            return np.inf
        return 2.0 ** (2.0 * split * r) - 1.0

    return gamma(profile.kappa), gamma(profile.kappa_bar)


def snr_constraint_rows(
    ch: ChannelSet, sp: SystemParams, gamma1: float, gamma2: float
) -> tuple[tuple[np.ndarray, float], tuple[np.ndarray, float]]:
    """Linear-trace forms of the two SNR constraints on X = w w^H.

    Direction 1 reads tr[(P_S2 F2 - gamma1 A1) X] >= gamma1 sigma_S1^2 and
    direction 2 swaps the roles; both matrices are Hermitian by construction.
    """
    nm = noise_matrices(ch, sp)
    f1, f2 = ch.f1, ch.f2
    b1 = sp.p_s2 * np.outer(f2.conj(), f2) - gamma1 * np.diag(nm.a1).astype(np.complex128)
    b2 = sp.p_s1 * np.outer(f1.conj(), f1) - gamma2 * np.diag(nm.a2).astype(np.complex128)
    return (b1, gamma1 * sp.sigma_s1_sq), (b2, gamma2 * sp.sigma_s2_sq)


def r_max_bound(ch: ChannelSet, sp: SystemParams, budget: PowerBudget) -> float:
    """Upper bound on the sum rate: twice the better one-way optimum.

    Each direction alone is a diagonal Rayleigh quotient whose maximum under
    the total-power budget has a closed form; individual budgets are relaxed
    to their sum, which can only enlarge the bound.
    """
    total = budget.p_r if isinstance(budget, SumPower) else float(np.sum(budget.p))
    nm = noise_matrices(ch, sp)
    snr1 = sp.p_s2 * float(
        np.sum(np.abs(ch.f2) ** 2 / (sp.sigma_s1_sq * nm.d / total + nm.a1))
    )
    snr2 = sp.p_s1 * float(
        np.sum(np.abs(ch.f1) ** 2 / (sp.sigma_s2_sq * nm.d / total + nm.a2))
    )
    r1 = 0.5 * np.log2(1.0 + snr1)
    r2 = 0.5 * np.log2(1.0 + snr2)
    return 2.0 * max(r1, r2)


def min_power_sdp(
    ch: ChannelSet, sp: SystemParams, kappa: float | RateProfile, r: float
) -> SdpSolution:
    """Minimum relay sum power supporting sum rate ``r`` at profile ``kappa``.

    The relaxation drops the rank-one constraint: minimize tr(D X) subject to
    the two SNR trace constraints and X PSD. The reported objective is the
    required power; unreachable targets come back Infeasible.
    """
    gamma1, gamma2 = snr_targets(kappa, r)
    k = ch.k
    if not np.isfinite(gamma1) or not np.isfinite(gamma2):
        return SdpSolution(
            x=np.zeros((k, k), dtype=np.complex128),
            status=SdpStatus.INFEASIBLE,
            objective=np.inf,
            max_violation=np.inf,
            duality_gap=np.inf,
        )
    if gamma1 == 0.0 and gamma2 == 0.0:
        # No rate requested: zero power is exactly optimal.
        return SdpSolution(
            x=np.zeros((k, k), dtype=np.complex128),
            status=SdpStatus.OPTIMAL,
            objective=0.0,
            max_violation=0.0,
            duality_gap=0.0,
        )
    nm = noise_matrices(ch, sp)
    problem = SdpProblem(
        dimension=k,
        objective=np.diag(nm.d).astype(np.complex128),
        constraints=snr_constraint_rows(ch, sp, gamma1, gamma2),
    )
    return solve_min_trace(problem)


def algorithm1_sum_power(
    ch: ChannelSet,
    sp: SystemParams,
    p_r: float,
    kappa: float | RateProfile,
    cfg: BisectionConfig = BisectionConfig(),
) -> tuple[float, np.ndarray]:
    """Largest relaxed sum rate supportable with total relay power ``p_r``.

    Bisects the sum rate, accepting a step when the minimum-power SDP is
    optimal within the budget. Returns the located rate and the PSD solution
    of the last feasible step (zero when no positive rate fits).
    """
    if not p_r > 0.0:
        raise DomainError("p_r must be positive")
    r_up = cfg.r_max if cfg.r_max is not None else r_max_bound(ch, sp, SumPower(p_r))
    r_low = 0.0
    x_best = np.zeros((ch.k, ch.k), dtype=np.complex128)
    for _ in range(cfg.max_iters):
        if r_up - r_low < cfg.epsilon:
            break
        r = 0.5 * (r_low + r_up)
        sol = min_power_sdp(ch, sp, kappa, r)
        if sol.status is SdpStatus.OPTIMAL and sol.objective <= p_r * (1.0 + 1e-9):
            r_low = r
            x_best = sol.x
        else:
            r_up = r
    else:
        raise SolverError(
            f"bisection did not reach epsilon={cfg.epsilon} in {cfg.max_iters} iterations"
        )
    return r_low, x_best


def algorithm2_individual(
    ch: ChannelSet,
    sp: SystemParams,
    p: np.ndarray,
    kappa: float | RateProfile,
    cfg: BisectionConfig = BisectionConfig(),
) -> tuple[float, np.ndarray]:
    """Largest relaxed sum rate supportable under per-relay power caps ``p``.

    Same bisection as the sum-power driver, but each step asks a max-slack
    feasibility SDP with the caps folded in as diagonal bounds X_ii <= p_i/D_ii.
    """
    caps_budget = IndividualPower(p)
    if caps_budget.k != ch.k:
        raise DomainError("per-relay caps must have one entry per relay")
    nm = noise_matrices(ch, sp)
    caps = caps_budget.p / nm.d
    r_up = cfg.r_max if cfg.r_max is not None else r_max_bound(ch, sp, caps_budget)
    r_low = 0.0
    x_best = np.zeros((ch.k, ch.k), dtype=np.complex128)
    for _ in range(cfg.max_iters):
        if r_up - r_low < cfg.epsilon:
            break
        r = 0.5 * (r_low + r_up)
        gamma1, gamma2 = snr_targets(kappa, r)
        if not np.isfinite(gamma1) or not np.isfinite(gamma2):
            r_up = r
            continue
        problem = SdpProblem(
            dimension=ch.k,
            objective=FEASIBILITY,
            constraints=snr_constraint_rows(ch, sp, gamma1, gamma2),
            caps=caps,
        )
        sol = solve_feasibility(problem)
        if sol.status is SdpStatus.OPTIMAL:
            r_low = r
            x_best = sol.x
        else:
            r_up = r
    else:
        raise SolverError(
            f"bisection did not reach epsilon={cfg.epsilon} in {cfg.max_iters} iterations"
        )
    return r_low, x_best


def _hermitian_basis(r: int) -> list[np.ndarray]:
    """Orthonormal real basis of r-by-r Hermitian matrices (r^2 elements)."""
    basis = []
    for i in range(r):
        e = np.zeros((r, r), dtype=np.complex128)
        e[i, i] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in range(r):
        for j in range(i + 1, r):
            e = np.zeros((r, r), dtype=np.complex128)
            e[i, j] = e[j, i] = inv_sqrt2
            basis.append(e)
            e = np.zeros((r, r), dtype=np.complex128)
            e[i, j] = -1j * inv_sqrt2
            e[j, i] = 1j * inv_sqrt2
            basis.append(e)
    return basis


def _trace_preserving_direction(mats: list[np.ndarray]) -> np.ndarray | None:
    """Nonzero Hermitian direction with zero trace inner product against each
    of ``mats``, or None when only the zero matrix qualifies."""
    r = mats[0].shape[0]
    basis = _hermitian_basis(r)
    rows = np.array(
        [[float(np.real(np.sum(m.conj() * h))) for h in basis] for m in mats]
    )
    _, svals, vt = np.linalg.svd(rows)
    # Null-space vectors correspond to singular values that vanish relative to
    # the largest; with r >= 2 there are r^2 >= 4 unknowns and 3 rows, so a
    # genuine null direction always exists.
    tol = max(rows.shape) * np.finfo(float).eps * (svals[0] if svals.size else 0.0)
    null_mask = np.zeros(len(basis), dtype=bool)
    null_mask[len(svals) :] = True
    null_mask[: len(svals)] = svals <= tol
    if not null_mask.any():
        return None
    coeffs = vt[np.argmax(null_mask)]
    delta = sum(cb * hb for cb, hb in zip(coeffs, basis))
    return 0.5 * (delta + delta.conj().T)


def rank_one_reduce(
    x_opt: np.ndarray,
    ch: ChannelSet,
    sp: SystemParams,
    gamma1: float,
    gamma2: float,
) -> RankOneResult:
    """Exact rank-one beamformer from a sum-power SDR optimum.

    With only two SNR constraints plus the power objective, any feasible X can
    be driven to rank one without changing its three trace values: factor
    X = V V^H, pick a Hermitian null direction Delta of the three compressed
    matrices V^H B V, and step to the PSD boundary with X <- V (I - Delta /
    lambda_max(Delta)) V^H, which removes at least one rank each pass. Should
    the null-space step ever degenerate numerically, the dominant eigenvector
    is returned instead and flagged.
    """
    x = np.asarray(x_opt, dtype=np.complex128)
    k = ch.k
    if x.shape != (k, k):
        raise DomainError("x_opt must be K-by-K for the channel's K")
    (b1, _), (b2, _) = snr_constraint_rows(ch, sp, gamma1, gamma2)
    d_mat = np.diag(noise_matrices(ch, sp).d).astype(np.complex128)

    vals, vecs = np.linalg.eigh(0.5 * (x + x.conj().T))
    floor = 1e-9 * max(float(vals.max(initial=0.0)), 0.0)
    keep = vals > max(floor, 0.0)
    if not keep.any():
        # Zero matrix: the zero beamformer is the faithful reduction.
        w = Beamformer(np.zeros(k, dtype=np.complex128))
        return RankOneResult(w=w, rates=rate_pair(ch, sp, w), source=ExactReduction())
    v = vecs[:, keep] * np.sqrt(vals[keep])

    fallback = False
    while v.shape[1] > 1:
        compressed = [v.conj().T @ m @ v for m in (b1, b2, d_mat)]
        delta = _trace_preserving_direction(compressed)
        if delta is None:
            fallback = True
            break
        dvals, dvecs = np.linalg.eigh(delta)
        if abs(dvals[0]) > dvals[-1]:
            # Either sign of the null direction works; take the one whose top
            # eigenvalue is the dominant magnitude for a well-scaled step.
            dvals, dvecs = np.linalg.eigh(-delta)
        lam_max = dvals[-1]
        if lam_max <= 0.0:
            # tr(V^H D V * Delta) = 0 against a positive definite matrix forces
            # indefiniteness, so a nonpositive spectrum signals degeneracy.
            fallback = True
            break
        shrink = np.maximum(1.0 - dvals / lam_max, 0.0)
        v = (v @ dvecs) * np.sqrt(shrink)
        v = v[:, shrink > 1e-14]
        if v.shape[1] == 0:
            fallback = True
            break

    if fallback or v.shape[1] != 1:
        top = int(np.argmax(vals))
        w_vec = vecs[:, top] * np.sqrt(max(vals[top], 0.0))
        # Scale up just enough to restore any SNR target the truncation lost;
        # targets unreachable along this direction are left as they are.
        grow = 1.0
        for mat, rhs in snr_constraint_rows(ch, sp, gamma1, gamma2):
            val = float(np.real(w_vec.conj() @ mat @ w_vec))
            if 0.0 < val < rhs:
                grow = max(grow, rhs / val)
        w = Beamformer(w_vec * np.sqrt(grow))
        return RankOneResult(
            w=w, rates=rate_pair(ch, sp, w), source=ExactReduction(fallback=True)
        )
    w = Beamformer(v[:, 0])
    return RankOneResult(w=w, rates=rate_pair(ch, sp, w), source=ExactReduction())


def randomize_rank_one(
    x_opt: np.ndarray,
    ch: ChannelSet,
    sp: SystemParams,
    gamma1: float,
    gamma2: float,
    *,
    num_candidates: int = 1000,
    seed: int,
) -> RankOneResult:
    """Randomized rank-one extraction respecting per-relay powers exactly.

    Candidates copy the solution's diagonal magnitudes and draw uniform phases,
    so every candidate spends exactly the per-relay power of ``x_opt``. The
    winner minimizes the worst relative SNR-constraint shortfall; nonpositive
    best violation means both targets are met.
    """
    if num_candidates < 1:
        raise DomainError("num_candidates must be at least 1")
    x = np.asarray(x_opt, dtype=np.complex128)
    k = ch.k
    if x.shape != (k, k):
        raise DomainError("x_opt must be K-by-K for the channel's K")
    nm = noise_matrices(ch, sp)
    mags = np.sqrt(np.maximum(np.real(np.diag(x)), 0.0))

    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(num_candidates, k))
    candidates = mags * np.exp(1j * phases)

    # Per-relay powers are phase-invariant, so the noise quadratic forms are
    # constant across candidates; only the signal terms vary.
    noise1 = float(mags**2 @ nm.a1)
    noise2 = float(mags**2 @ nm.a2)
    violations = np.full(num_candidates, -np.inf)
    if gamma1 > 0.0:
        signal1 = np.abs(candidates @ ch.f2) ** 2
        v1 = 1.0 - (sp.p_s2 * signal1 - gamma1 * noise1) / (gamma1 * sp.sigma_s1_sq)
        violations = np.maximum(violations, v1)
    if gamma2 > 0.0:
        signal2 = np.abs(candidates @ ch.f1) ** 2
        v2 = 1.0 - (sp.p_s1 * signal2 - gamma2 * noise2) / (gamma2 * sp.sigma_s2_sq)
        violations = np.maximum(violations, v2)

    best = int(np.argmin(violations))
    w = Beamformer(candidates[best])
    return RankOneResult(
        w=w,
        rates=rate_pair(ch, sp, w),
        source=Randomization(
            num_candidates=num_candidates, best_violation=float(violations[best])
        ),
    )
