"""Convergence observables for long-time runs.

Four quantities track whether a run approaches its predicted limit
profile: the sup-norm distance to that profile on the grid, the trace
v(alpha, s) at the source, and two integral summaries of the recorded
precipitation history along the source line,

    h(x)     = (1/x) * integral_0^x  xi^2 p*(xi) dxi
    Gamma(x) = x * integral_x^inf p*(xi) dxi

evaluated by left-endpoint Riemann sums with p* identified with the
recorded source-cell indicators q_hist[k] at xi_k = alpha*s_k.  Both
converge to the matched sink strength gamma exactly when the solution
converges to the matched profile, so they serve as independent
estimators of gamma.  Gamma(x) is necessarily truncated at the record
end and therefore underestimates the true tail; the truncation is
bounded by roughly gamma_est * x / (alpha * s_max) when p* decays like
gamma/xi^2, and that bound is reported next to the value by the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Union

import numpy as np

from .errors import OutOfRange
from .profiles import (
    ModelParams,
    Regime,
    SelfSimilarProfile,
    classify_regime,
    gamma_of_ustar,
    make_profile,
    phi_gamma,
    psi,
)

if TYPE_CHECKING:
    from .solver import Grid, SolverState

__all__ = [
    "DiagnosticsRecord",
    "DiagnosticsSample",
    "discrete_gamma_tail",
    "discrete_h",
    "precipitation_extent",
    "select_target",
    "sup_error",
    "target_on_grid",
]

TargetSpec = Union[SelfSimilarProfile, Callable[[float], float]]


@dataclass(frozen=True)
class DiagnosticsSample:
    """One sampled instant of a run.

    h_val is evaluated at the full covered abscissa x = alpha*s and
    gamma_tail at the half-coverage point x = alpha*s/2 (both 0 at
    s = 0, where the record is empty).
    """

    s: float
    sup_err: float
    v_alpha: float
    h_val: float
    gamma_tail: float
    extent_x: float


@dataclass
class DiagnosticsRecord:
    """Time series of diagnostics plus the target they are measured against.

    target_label names the long-time profile behind sup_err: "psi" for
    subcritical and marginal runs, "phi_0" for transitional and
    critical, "phi_gamma" for supercritical.  matched_gamma is the sink
    strength of that target (0 unless supercritical).
    """

    target_label: str
    matched_gamma: float
    samples: list[DiagnosticsSample] = field(default_factory=list)


def select_target(params: ModelParams) -> tuple[str, float, SelfSimilarProfile | None]:
    """Pick the profile a long run should approach for these parameters."""
    regime = classify_regime(params)
    if regime is Regime.SUPERCRITICAL:
        gamma = gamma_of_ustar(params)
        return "phi_gamma", gamma, make_profile(params, gamma)
    if regime in (Regime.TRANSITIONAL, Regime.CRITICAL):
        return "phi_0", 0.0, make_profile(params, 0.0)
    return "psi", 0.0, None


def target_on_grid(params: ModelParams, grid: "Grid") -> tuple[str, float, np.ndarray]:
    """Target label, matched gamma, and target values on the grid nodes."""
    label, gamma, profile = select_target(params)
    nodes = grid.nodes()
    if profile is None:
        values = np.array([psi(params, float(e)) for e in nodes])
    else:
        values = np.array([phi_gamma(profile, params, float(e)) for e in nodes])
    return label, gamma, values


def sup_error(
    w: np.ndarray, grid: "Grid", profile: TargetSpec, params: ModelParams
) -> float:
    """Sup-norm distance of the reconstructed solution w + psi to a target.

    The target may be a profile object or any callable eta -> value.
    """
    nodes = grid.nodes()
    base = np.array([psi(params, float(e)) for e in nodes])
    if isinstance(profile, SelfSimilarProfile):
        target = np.array([phi_gamma(profile, params, float(e)) for e in nodes])
    else:
        target = np.array([profile(float(e)) for e in nodes])
    return float(np.max(np.abs(w + base - target)))


def _h_at_index(q_hist: np.ndarray, d_s: float, alpha: float, j: int) -> float:
    """Weighted average h at the record abscissa x_j = alpha*j*d_s."""
    if j == 0:
        return 0.0
    d_xi = alpha * d_s
    xi = alpha * d_s * np.arange(j + 1)
    total = float(np.sum(xi * xi * np.asarray(q_hist[: j + 1]) * d_xi))
    return total / (j * d_xi)


def _tail_at_index(
    q_hist: np.ndarray, d_s: float, alpha: float, k0: int, x: float
) -> float:
    """Truncated tail integral x * sum_{k >= k0} q_hist[k] * alpha * d_s."""
    d_xi = alpha * d_s
    return float(x * np.sum(np.asarray(q_hist[k0:]) * d_xi))


def discrete_h(q_hist: np.ndarray, grid: "Grid", params: ModelParams, x: float) -> float:
    """Weighted precipitation average up to x, snapped to the record grid.

    The abscissa snaps down to x_J = J*alpha*d_s with J = floor(x /
    (alpha*d_s)); the sum runs over the recorded entries k <= J.
    Returns 0 for x below the first record spacing.
    """
    if x < 0.0:
        raise OutOfRange(f"x must be >= 0, got {x!r}")
    if grid.d_s <= 0.0:
        if x == 0.0:
            return 0.0
        raise OutOfRange("record has zero coverage (m = 0 grid)")
    j = int(math.floor(x / (params.alpha * grid.d_s)))
    if j >= len(q_hist):
        covered = params.alpha * grid.d_s * (len(q_hist) - 1)
        raise OutOfRange(f"x = {x!r} beyond record coverage {covered!r}")
    return _h_at_index(q_hist, grid.d_s, params.alpha, j)


def discrete_gamma_tail(
    q_hist: np.ndarray, grid: "Grid", params: ModelParams, x: float
) -> float:
    """Tail integral x * sum over recorded xi_k >= x, truncated at the record end.

    The truncation discards the unrecorded tail beyond alpha*s of the
    last entry, so the result is a lower bound for the true tail; with
    p* decaying like gamma/xi^2 the deficit is about gamma*x/(alpha*s_max).
    """
    if grid.d_s <= 0.0:
        raise OutOfRange("record has zero coverage (m = 0 grid)")
    covered = params.alpha * grid.d_s * (len(q_hist) - 1)
    if not (0.0 < x <= covered):
        raise OutOfRange(f"x must lie in (0, {covered!r}], got {x!r}")
    k0 = int(math.ceil(x / (params.alpha * grid.d_s)))
    return _tail_at_index(q_hist, grid.d_s, params.alpha, k0, x)


def precipitation_extent(state: "SolverState") -> float:
    """Largest physical x = eta_i * s_j ever flagged at or beyond the source.

    0 before any ignition.  This can only grow over a run: fresh flags
    extend the covered region to the right, while transported flags
    keep earlier physical positions.
    """
    return state.ignited_x
