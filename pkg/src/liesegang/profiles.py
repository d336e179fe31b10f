"""Closed-form self-similar profiles and regime analysis.

The model is a one-dimensional heat equation driven by a point source
moving along x = alpha*sqrt(t), with a precipitation sink that switches
on permanently wherever the concentration has exceeded a threshold u*.
In the similarity variable eta = x/sqrt(t) the source sits at the fixed
position eta = alpha and two closed-form steady profiles organize the
long-time behaviour:

* ``psi``: the profile with precipitation switched off.  It is constant
  on [0, alpha] and decays like erfc beyond the source.
* ``phi_gamma``: a one-parameter family of profiles with a sink of
  strength gamma active behind the source, built from Kummer's function
  on the inner branch and erfc on the outer branch.

Each family member takes the value ``u_star_gamma`` at the source, and
that value decreases strictly as gamma grows.  The matching condition
(``gamma_of_ustar``) picks the member whose source value equals the
model threshold u*; it is solvable exactly when u* lies below the
gamma = 0 value u*_0, the supercritical regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import NegativeGamma, NonConvergence, NoRoot, NotSupercritical
from .specfun import Accuracy, erfc, kummer_m

__all__ = [
    "KNIFE_EDGE_TOL",
    "ModelParams",
    "Regime",
    "SelfSimilarProfile",
    "alpha_star",
    "classify_regime",
    "gamma_of_ustar",
    "kappa_of_gamma",
    "make_profile",
    "phi_gamma",
    "phi_gamma_derivative",
    "psi",
    "ustar_of_gamma",
]

_SQRT_PI = math.sqrt(math.pi)

# Default absolute tolerance for the marginal/critical knife edges.
# These are measure-zero parameter sets; the label is advisory.
KNIFE_EDGE_TOL = 1e-9

_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of one experiment.

    Attributes
    ----------
    alpha : float
        Source position in the similarity variable (source at eta = alpha).
    beta : float
        Source strength.
    u_star : float
        Precipitation threshold concentration.
    """

    alpha: float
    beta: float
    u_star: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "u_star"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    @property
    def psi_at_alpha(self) -> float:
        """Value of the no-precipitation profile at the source."""
        return psi(self, self.alpha)

    @property
    def ustar_zero(self) -> float:
        """Largest source value attainable by the sink family (gamma = 0)."""
        return ustar_of_gamma(self, 0.0)


class Regime(Enum):
    """Where the threshold u* sits relative to psi(alpha) and u*_0."""

    SUBCRITICAL = "subcritical"
    MARGINAL = "marginal"
    TRANSITIONAL = "transitional"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class SelfSimilarProfile:
    """One member of the steady-profile family, with cached coefficients.

    Build instances with ``make_profile`` so the normalization constants
    stay consistent with each other; the branch coefficients are

        c1 = u_star_gamma / (alpha^kappa * M(kappa/2, kappa + 1/2, -alpha^2/4))
        c2 = u_star_gamma / erfc(alpha/2)

    which make both branches equal u_star_gamma at eta = alpha.
    """

    gamma: float
    kappa: float
    u_star_gamma: float
    c1: float
    c2: float


def psi(params: ModelParams, eta: float) -> float:
    """No-precipitation steady profile at eta >= 0.

    Constant at its source value on [0, alpha], an erfc tail beyond;
    continuous everywhere and strictly decreasing past the source.
    """
    a = params.alpha
    scale = a * params.beta * _SQRT_PI / 2.0 * math.exp(a * a / 4.0)
    return scale * erfc(max(eta, a) / 2.0)


def kappa_of_gamma(gamma: float) -> float:
    """Inner-branch exponent: the root kappa >= 1 of kappa*(kappa-1) = gamma."""
    if not (gamma >= 0.0):
        raise NegativeGamma(f"gamma must be >= 0, got {gamma!r}")
    return 0.5 * (1.0 + math.sqrt(4.0 * gamma + 1.0))


def _ustar_of_kappa(params: ModelParams, kappa: float, acc: Accuracy | None) -> float:
    """Source value of the family member with inner exponent kappa."""
    a = params.alpha
    z = -a * a / 4.0
    m0 = kummer_m(kappa / 2.0, kappa + 0.5, z, acc)
    m1 = kummer_m(kappa / 2.0 + 1.0, kappa + 0.5, z, acc)
    slope = kappa * m1 / (a * m0) + math.exp(z) / (_SQRT_PI * erfc(a / 2.0))
    return 0.5 * a * params.beta / slope


def ustar_of_gamma(params: ModelParams, gamma: float, acc: Accuracy | None = None) -> float:
    """Source value u*_gamma of the profile with sink strength gamma.

    Strictly decreasing in gamma: gamma = 0 gives the largest value
    u*_0 = psi(alpha) * erf(alpha/2), and u*_gamma tends to 0 as gamma
    grows.  The denominator is the sum of the one-sided derivative
    magnitudes demanded by the source jump, so every profile built from
    this value satisfies the jump condition automatically.
    """
    return _ustar_of_kappa(params, kappa_of_gamma(gamma), acc)


def gamma_of_ustar(params: ModelParams, acc: Accuracy | None = None) -> float:
    """Matched sink strength: the unique gamma > 0 with u*_gamma = u*.

    Exists exactly when the run is supercritical (u* < u*_0).  Solved
    by bisection on the exponent kappa, where the source value is
    strictly monotone, with the upper bracket doubled until it crosses
    the target; the bracket is then halved to floating-point resolution,
    well inside the 1e-10 relative tolerance this function promises.
    """
    u0 = _ustar_of_kappa(params, 1.0, acc)
    if not (params.u_star < u0):
        raise NotSupercritical(
            f"matching requires u_star < u*_0 = {u0!r}, got u_star = {params.u_star!r}"
        )
    lo = 1.0
    hi = 2.0
    while _ustar_of_kappa(params, hi, acc) >= params.u_star:
        lo = hi
        hi *= 2.0
        if hi > 1e12:
            raise NonConvergence(
                f"no bracket found for u_star = {params.u_star!r} below kappa = {hi!r}"
            )
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _ustar_of_kappa(params, mid, acc) > params.u_star:
            lo = mid
        else:
            hi = mid
    kappa = 0.5 * (lo + hi)
    return kappa * (kappa - 1.0)


def make_profile(
    params: ModelParams, gamma: float, acc: Accuracy | None = None
) -> SelfSimilarProfile:
    """Construct the family member with sink strength gamma >= 0."""
    kappa = kappa_of_gamma(gamma)
    u = _ustar_of_kappa(params, kappa, acc)
    a = params.alpha
    z = -a * a / 4.0
    c1 = u / (a**kappa * kummer_m(kappa / 2.0, kappa + 0.5, z, acc))
    c2 = u / erfc(a / 2.0)
    return SelfSimilarProfile(gamma=gamma, kappa=kappa, u_star_gamma=u, c1=c1, c2=c2)


def phi_gamma(
    profile: SelfSimilarProfile,
    params: ModelParams,
    eta: float,
    acc: Accuracy | None = None,
) -> float:
    """Evaluate the steady profile at eta >= 0.

    Inner branch (eta < alpha): c1 * eta^kappa * M(kappa/2, kappa + 1/2,
    -eta^2/4).  Outer branch (eta >= alpha): c2 * erfc(eta/2).  The two
    meet continuously at the source with value u_star_gamma.
    """
    if eta < params.alpha:
        if eta == 0.0:
            return 0.0
        k = profile.kappa
        return profile.c1 * eta**k * kummer_m(k / 2.0, k + 0.5, -eta * eta / 4.0, acc)
    return profile.c2 * erfc(eta / 2.0)


def phi_gamma_derivative(
    profile: SelfSimilarProfile,
    params: ModelParams,
    eta: float,
    side: str,
    acc: Accuracy | None = None,
) -> float:
    """One-sided derivative of the steady profile at eta > 0.

    side "left" evaluates the inner-branch formula
    c1 * kappa * eta^(kappa-1) * M(kappa/2 + 1, kappa + 1/2, -eta^2/4),
    valid for eta <= alpha; side "right" evaluates the outer-branch
    formula -c2 * exp(-eta^2/4) / sqrt(pi), valid for eta >= alpha.  At
    eta = alpha the two sides differ by exactly the source jump
    -alpha*beta/2 (by construction of u_star_gamma).
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if side == "right":
        return -profile.c2 * math.exp(-eta * eta / 4.0) / _SQRT_PI
    k = profile.kappa
    return profile.c1 * k * eta ** (k - 1.0) * kummer_m(k / 2.0 + 1.0, k + 0.5, -eta * eta / 4.0, acc)


def classify_regime(params: ModelParams, tol: float = KNIFE_EDGE_TOL) -> Regime:
    """Classify the threshold against the two critical values.

    Ties within the absolute tolerance go to the knife-edge labels, so
    a boundary case is never mistaken for a strict inequality:

        u* > psi(alpha)            subcritical (no precipitation ever)
        u* = psi(alpha)            marginal
        u*_0 < u* < psi(alpha)     transitional (bounded precipitation)
        u* = u*_0                  critical
        u* < u*_0                  supercritical (unbounded re-ignition)
    """
    psi_a = psi(params, params.alpha)
    u0 = ustar_of_gamma(params, 0.0)
    u = params.u_star
    if abs(u - psi_a) <= tol:
        return Regime.MARGINAL
    if u > psi_a:
        return Regime.SUBCRITICAL
    if abs(u - u0) <= tol:
        return Regime.CRITICAL
    if u > u0:
        return Regime.TRANSITIONAL
    return Regime.SUPERCRITICAL


def alpha_star(params: ModelParams) -> float:
    """Position where the no-precipitation profile drops to u*.

    Defined when u* < psi(alpha); the erfc tail is strictly decreasing
    past the source, so the crossing psi(alpha_star) = u* is unique.
    Found by doubling the upper bracket and bisecting to floating-point
    resolution.
    """
    psi_a = psi(params, params.alpha)
    if not (params.u_star < psi_a):
        raise NoRoot(
            f"alpha_star requires u_star < psi(alpha) = {psi_a!r}, "
            f"got u_star = {params.u_star!r}"
        )
    lo = params.alpha
    hi = 2.0 * params.alpha
    while psi(params, hi) >= params.u_star:
        lo = hi
        hi *= 2.0
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if psi(params, mid) > params.u_star:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
