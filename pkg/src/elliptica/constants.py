"""Closed-form constants for (K, Kp)-elliptic harmonic mappings.

For a sense-preserving harmonic map of the unit disk with f(0) = 0,
lambda_f(0) = 1, lambda_f <= lam and |Df|^2 <= K*J_f + Kp, the series
coefficients grow no faster than T/n with

    T = K*lam + 2*(Kp - 1) / (K*lam + sqrt(K**2*lam**2 + 4*Kp)),

f is univalent on the disk of radius r1 = 1/(1 + T), and the image covers a
disk of radius sigma1 = psi(T), where

    psi(t) = 1 + t*log(t / (1 + t)),   t > 0,

extended by continuity to psi(0) = 1.  psi is strictly decreasing with range
(0, 1).  Two Bloch-type lower bounds come from renormalizing an arbitrary map
(no pointwise distortion cap): one for minimum-distortion normalization
lambda_f(0) = 1, one for Jacobian normalization J_f(0) = 1.  The classical
bounded-analytic constants (univalence radius r0, covered radius R0 for
|f| <= M, f'(0) = 1) are included for comparison fixtures.

Every function accepts a ``ctx`` module (``math`` by default) so the same
formulas run on floats or, with ``ctx=mpmath`` and mpf arguments, at any
working precision; the high-precision route is what the 1e-12 identity tests
use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distortion import EllipticityParams

__all__ = [
    "DistortionBound",
    "LandauResult",
    "BlochBound",
    "ClassicalLandau",
    "RemarkChecks",
    "psi",
    "growth_rate",
    "coeff_bound",
    "landau",
    "bloch_lambda_normalized",
    "bloch_jacobian_normalized",
    "classical_landau",
    "remark_inequalities",
]


@dataclass(frozen=True)
class DistortionBound:
    """Pointwise cap on a distortion quantity (lambda_f, or Lambda_f for the
    maximum-distortion variant of the coefficient bound)."""

    lam: float

    def __post_init__(self) -> None:
        if not (math.isfinite(float(self.lam)) and self.lam >= 1):
            raise ValueError("lam must be finite and >= 1")


@dataclass(frozen=True)
class LandauResult:
    """Growth rate T, univalence radius r1 = 1/(1+T), covered radius sigma1 = psi(T)."""

    T: float
    r1: float
    sigma1: float

    def __post_init__(self) -> None:
        if self.T < 0:
            raise ValueError("T must be >= 0")


@dataclass(frozen=True)
class BlochBound:
    """Lower bound rho for the largest univalent-image disk, with its rate t.

    kind records the normalization the bound applies under: "lambda0" for
    lambda_f(0) = 1, "jacobian0" for J_f(0) = 1.
    """

    t: float
    rho: float
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ("lambda0", "jacobian0"):
            raise ValueError('kind must be "lambda0" or "jacobian0"')
        if not self.t > 0:
            raise ValueError("t must be positive")
        if not (0 < self.rho < 1):
            raise ValueError("rho must lie in (0, 1)")


@dataclass(frozen=True)
class ClassicalLandau:
    """Bounded-analytic comparison constants: radii r0 and R0 for |f| <= M."""

    M: float
    r0: float
    R0: float


def psi(t, ctx=math):
    """The covered-radius function 1 + t*log(t/(1+t)); requires t > 0."""
    if not t > 0:
        raise ValueError("psi requires t > 0")
    return 1 + t * ctx.log(t / (1 + t))


def growth_rate(params: EllipticityParams, bound: DistortionBound, ctx=math):
    """Coefficient growth rate T for the given (K, Kp) and distortion cap.

    Nonnegative for every valid input (K >= 1 and lam >= 1 force K*lam >= 1),
    and exactly zero only at K*lam = 1 with Kp = 0.
    """
    K, Kp, lam = params.K, params.Kp, bound.lam
    root = ctx.sqrt(K * K * lam * lam + 4 * Kp)
    return K * lam + 2 * (Kp - 1) / (K * lam + root)


def coeff_bound(n: int, params: EllipticityParams, bound: DistortionBound, ctx=math):
    """Largest admissible |a_n| + |b_n| for degree n >= 2, namely T/n."""
    if not (isinstance(n, int) and n >= 2):
        raise ValueError("n must be an integer >= 2")
    return growth_rate(params, bound, ctx) / n


def landau(params: EllipticityParams, bound: DistortionBound, ctx=math) -> LandauResult:
    """Univalence radius and covered radius under a minimum-distortion cap.

    The degenerate rate T = 0 (identity-like normalization, K*lam = 1, Kp = 0)
    gets sigma1 = 1 by continuity of psi.
    """
    T = growth_rate(params, bound, ctx)
    r1 = 1 / (1 + T)
    sigma1 = psi(T, ctx) if T > 0 else T + 1
    return LandauResult(T=T, r1=r1, sigma1=sigma1)


def bloch_lambda_normalized(params: EllipticityParams, ctx=math) -> BlochBound:
    """Bloch-type bound psi(t)/sqrt(2) under lambda_f(0) = 1."""
    K, Kp = params.K, params.Kp
    t = 2 * K + (4 * Kp - 1) / (K + ctx.sqrt(K * K + 4 * Kp))
    return BlochBound(t=t, rho=psi(t, ctx) / ctx.sqrt(2), kind="lambda0")


def bloch_jacobian_normalized(params: EllipticityParams, ctx=math) -> BlochBound:
    """Bloch-type bound psi(t)/sqrt(2*(K+Kp)) under J_f(0) = 1.

    Rescaling a Jacobian-normalized map to unit minimum distortion inflates the
    additive constant to Kp*(K+Kp); the rate t reflects that.
    """
    K, Kp = params.K, params.Kp
    kp_eff = Kp * (K + Kp)
    t = 2 * K + (4 * kp_eff - 1) / (K + ctx.sqrt(K * K + 4 * kp_eff))
    return BlochBound(t=t, rho=psi(t, ctx) / ctx.sqrt(2 * (K + Kp)), kind="jacobian0")


def classical_landau(M, ctx=math) -> ClassicalLandau:
    """Classical constants for analytic f with |f| <= M, f(0) = 0, f'(0) = 1."""
    if not (math.isfinite(float(M)) and M >= 1):
        raise ValueError("M must be finite and >= 1")
    r0 = 1 / (M + ctx.sqrt(M * M - 1))
    return ClassicalLandau(M=M, r0=r0, R0=M * r0 * r0)


@dataclass(frozen=True)
class RemarkChecks:
    """Literal evaluation of the improvement inequalities over the baseline
    rate K*lam + sqrt(Kp) (the coarser growth bound this theory sharpens).

    radius_literal_* evaluates the printed comparison r1 > 1/baseline exactly
    as displayed; it FAILS on part of the parameter range (e.g. K=1, Kp=0,
    lam=2 gives slack -0.1) and is recorded, never asserted.  The chain of
    inequalities behind the claim supports T < baseline, i.e.
    r1 > 1/(1 + baseline), which radius_* captures; campaigns assert that
    form together with correction_* and sigma_*.
    """

    growth_rate: float
    baseline_rate: float
    correction_holds: bool
    correction_slack: float
    radius_literal_holds: bool
    radius_literal_slack: float
    radius_holds: bool
    radius_slack: float
    sigma_holds: bool
    sigma_slack: float

    def to_json_dict(self) -> dict:
        return {
            "growth_rate": float(self.growth_rate),
            "baseline_rate": float(self.baseline_rate),
            "correction": {"holds": self.correction_holds, "slack": float(self.correction_slack)},
            "radius_literal": {
                "holds": self.radius_literal_holds,
                "slack": float(self.radius_literal_slack),
            },
            "radius": {"holds": self.radius_holds, "slack": float(self.radius_slack)},
            "sigma": {"holds": self.sigma_holds, "slack": float(self.sigma_slack)},
        }


def remark_inequalities(params: EllipticityParams, bound: DistortionBound, ctx=math) -> RemarkChecks:
    """Evaluate the three baseline-improvement inequalities at one (K, Kp, lam).

    Requires lam > 1: the comparisons are stated for a genuine distortion cap,
    and at lam = 1 the baseline psi argument can degenerate.
    """
    K, Kp, lam = params.K, params.Kp, bound.lam
    if not lam > 1:
        raise ValueError("remark_inequalities requires lam > 1")

    res = landau(params, bound, ctx)
    baseline = K * lam + ctx.sqrt(Kp)

    root = ctx.sqrt(K * K * lam * lam + 4 * Kp)
    correction_slack = ctx.sqrt(Kp) - 2 * (Kp - 1) / (K * lam + root)

    radius_literal_slack = res.r1 - 1 / baseline
    radius_slack = res.r1 - 1 / (1 + baseline)
    sigma_slack = res.sigma1 - psi(baseline, ctx)

    return RemarkChecks(
        growth_rate=res.T,
        baseline_rate=baseline,
        correction_holds=bool(correction_slack > 0),
        correction_slack=correction_slack,
        radius_literal_holds=bool(radius_literal_slack > 0),
        radius_literal_slack=radius_literal_slack,
        radius_holds=bool(radius_slack > 0),
        radius_slack=radius_slack,
        sigma_holds=bool(sigma_slack > 0),
        sigma_slack=sigma_slack,
    )
