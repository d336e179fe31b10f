"""Implicit finite-difference scheme in parabolic similarity coordinates.

The solver advances the deviation w = v - psi, where v(eta, s) is the
concentration in the similarity variables eta = x/sqrt(t), s = sqrt(t).
Working with w removes the point source exactly (psi absorbs it), so
the discrete equation is

    s w_s - eta w_eta = 2 w_etaeta - 2 s^2 q (psi + w)

with w = 0 initially and at the far boundary.  Each step solves one
tridiagonal system: first-order implicit time stepping, first-order
upwind advection, centered diffusion, and a fully explicit reaction
term.  The precipitation field q is binary at and beyond the source;
behind the source it is reconstructed from the history of the source
cell by transport along the characteristics x = const, which in index
space is the rescaling i -> i*j/n.

The grid puts n cells on [0, alpha] and extends to n_full = 6n cells so
the homogeneous Dirichlet closure sits far from the action.  w_i^j then
approximates w(i*d_eta, j*d_s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .diagnostics import (
    DiagnosticsRecord,
    DiagnosticsSample,
    _h_at_index,
    _tail_at_index,
    target_on_grid,
)
from .errors import InvalidGrid, SingularPivot
from .profiles import ModelParams, psi

__all__ = [
    "Grid",
    "SolverState",
    "TridiagonalSystem",
    "assemble_system",
    "build_grid",
    "initial_state",
    "psi_on_grid",
    "run",
    "step",
    "thomas_solve",
    "update_precipitation",
]

_PIVOT_FLOOR = 1e-300

Observer = Callable[[int, float, np.ndarray, np.ndarray, "int | None"], None]


@dataclass(frozen=True)
class Grid:
    """Discretization constants.

    n cells span [0, alpha] so d_eta = alpha/n; the full domain holds
    n_full = 6n cells at eta_i = i*d_eta.  Time is uniform with
    d_s = s_max/m (d_s = 0 for the degenerate snapshot-only case m = 0).
    """

    n: int
    n_full: int
    d_eta: float
    m: int
    s_max: float
    d_s: float

    def nodes(self) -> np.ndarray:
        """Node coordinates eta_i = i*d_eta for i = 0..n_full-1."""
        return self.d_eta * np.arange(self.n_full)


def build_grid(params: ModelParams, n: int, m: int, s_max: float) -> Grid:
    """Validate sizes and derive the grid constants."""
    if n < 2:
        raise InvalidGrid(f"n must be >= 2, got {n!r}")
    if m < 0:
        raise InvalidGrid(f"m must be >= 0, got {m!r}")
    if not (s_max > 0.0 and math.isfinite(s_max)):
        raise InvalidGrid(f"s_max must be positive and finite, got {s_max!r}")
    d_eta = params.alpha / n
    d_s = s_max / m if m > 0 else 0.0
    return Grid(n=n, n_full=6 * n, d_eta=d_eta, m=m, s_max=s_max, d_s=d_s)


def psi_on_grid(params: ModelParams, grid: Grid) -> np.ndarray:
    """Precompute the no-precipitation profile on the grid nodes."""
    return np.array([psi(params, float(e)) for e in grid.nodes()])


class SolverState:
    """Mutable state of one run at time index j (s_j = j*d_s).

    Attributes
    ----------
    j : int
        Current step index.
    w : ndarray
        Deviation of the solution from psi on the n_full nodes.
    q : ndarray
        Precipitation field; binary at and beyond the source cell,
        reconstructed (and possibly outside [0,1]) behind it.
    i_precip : int or None
        Rightmost ignited index, None before any ignition.
    ignited_x : float
        Largest physical position x = eta_i * s_j ever flagged at or
        beyond the source; 0 before any ignition.

    The source-cell history q_n^k and its running sums are stored in
    preallocated arrays; ``q_hist`` and ``q_running`` expose them.
    """

    __slots__ = ("j", "w", "q", "i_precip", "ignited_x", "_q_hist", "_q_prefix")

    def __init__(self, grid: Grid):
        self.j = 0
        self.w = np.zeros(grid.n_full)
        self.q = np.zeros(grid.n_full)
        self.i_precip: int | None = None
        self.ignited_x = 0.0
        cap = grid.m + 1 if grid.m > 0 else 16
        self._q_hist = np.zeros(cap)
        self._q_prefix = np.zeros(cap)

    @property
    def q_hist(self) -> np.ndarray:
        """Source-cell indicator history q_n^k for k = 0..j."""
        return self._q_hist[: self.j + 1]

    @property
    def q_running(self) -> float:
        """Running sum of the recorded source-cell indicators."""
        return float(self._q_prefix[self.j])

    def _record_source_flag(self, value: float) -> None:
        # grows the history storage when stepping past the planned m
        if self.j >= len(self._q_hist):
            grown = np.zeros(2 * len(self._q_hist))
            grown[: len(self._q_hist)] = self._q_hist
            self._q_hist = grown
            grown = np.zeros(len(self._q_prefix) * 2)
            grown[: len(self._q_prefix)] = self._q_prefix
            self._q_prefix = grown
        self._q_hist[self.j] = value
        prev = self._q_prefix[self.j - 1] if self.j > 0 else 0.0
        self._q_prefix[self.j] = prev + value


def initial_state(grid: Grid) -> SolverState:
    """Zero-field state at s = 0 with an empty ignition history."""
    return SolverState(grid)


@dataclass(eq=False)
class TridiagonalSystem:
    """Rows lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].

    lower[0] and upper[-1] are ignored.  Assembled systems are strictly
    diagonally dominant with slack at least the time index j.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray


def assemble_system(state: SolverState, grid: Grid, psi_vals: np.ndarray) -> TridiagonalSystem:
    """Build the implicit system for the step to index j = state.j + 1.

    Coefficients per interior row i: diag = j + i + 4/d_eta^2, lower =
    -2/d_eta^2, upper = -i - 2/d_eta^2.  The symmetry row at i = 0
    folds the mirrored ghost neighbor into upper_0 = -4/d_eta^2, and
    the far boundary closes with the homogeneous Dirichlet ghost.  The
    reaction term sits fully on the right-hand side, evaluated at the
    previous step.
    """
    j = state.j + 1
    nf = grid.n_full
    inv_h2 = 1.0 / (grid.d_eta * grid.d_eta)
    idx = np.arange(nf, dtype=float)
    diag = j + idx + 4.0 * inv_h2
    lower = np.full(nf, -2.0 * inv_h2)
    lower[0] = 0.0
    upper = -idx - 2.0 * inv_h2
    upper[0] = -4.0 * inv_h2
    upper[-1] = 0.0
    rhs = j * state.w - 2.0 * j * j * grid.d_s * grid.d_s * state.q * (psi_vals + state.w)
    return TridiagonalSystem(lower=lower, diag=diag, upper=upper, rhs=rhs)


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """Solve the tridiagonal system by elimination and back substitution.

    Exact up to rounding for the diagonally dominant systems the
    assembly produces; raises SingularPivot if an eliminated pivot
    underflows (defensive, cannot occur for valid assemblies).
    """
    lower = system.lower.tolist()
    diag = system.diag.tolist()
    upper = system.upper.tolist()
    rhs = system.rhs.tolist()
    size = len(diag)
    cp = [0.0] * size
    dp = [0.0] * size
    piv = diag[0]
    if abs(piv) < _PIVOT_FLOOR:
        raise SingularPivot("pivot underflow at row 0")
    cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, size):
        piv = diag[i] - lower[i] * cp[i - 1]
        if abs(piv) < _PIVOT_FLOOR:
            raise SingularPivot(f"pivot underflow at row {i}")
        cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / piv
    x = [0.0] * size
    x[-1] = dp[-1]
    for i in range(size - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)


def update_precipitation(
    state: SolverState, grid: Grid, psi_vals: np.ndarray, params: ModelParams
) -> SolverState:
    """Refresh the precipitation field after w has advanced to index j.

    At and beyond the source (i >= n) the field is binary: the
    rightmost ignited index is the larger of the current threshold
    crossing max{k >= n : w_k + psi_k > u*} and the previous index
    transported one step along the characteristics,
    floor(I_prev*(j-1)/j).  Before any ignition both are absent and
    the sentinel None propagates.  The source-cell value q_n is then
    recorded, and the region behind the source (i < n) is filled from
    the history: a direct lookup q_hist[floor(i*j/n)] while j <= n, and
    for j > n the conservative average (n/j) * (Q_{J(i+1)} - Q_{J(i)})
    of the running sums, which may leave [0, 1].
    """
    j = state.j
    n = grid.n

    u_outer = state.w[n:] + psi_vals[n:]
    hot = np.nonzero(u_outer > params.u_star)[0]
    fresh = int(hot[-1]) + n if hot.size else None
    carried = None
    if state.i_precip is not None and j > 0:
        carried = (state.i_precip * (j - 1)) // j
    if fresh is None and carried is None:
        rightmost = None
    elif fresh is None:
        rightmost = carried
    elif carried is None:
        rightmost = fresh
    else:
        rightmost = max(fresh, carried)
    state.i_precip = rightmost

    state.q[n:] = 0.0
    if rightmost is not None and rightmost >= n:
        state.q[n : rightmost + 1] = 1.0
        s_j = j * grid.d_s
        state.ignited_x = max(state.ignited_x, rightmost * grid.d_eta * s_j)

    state._record_source_flag(float(state.q[n]))

    if j <= n:
        lookup = (np.arange(n) * j) // n
        state.q[:n] = state._q_hist[lookup]
    else:
        edges = (np.arange(n + 1) * j) // n
        sums = state._q_prefix[edges]
        state.q[:n] = (n / j) * (sums[1:] - sums[:-1])
    return state


def step(
    state: SolverState, grid: Grid, psi_vals: np.ndarray, params: ModelParams
) -> SolverState:
    """Advance one time step: assemble, solve, then refresh precipitation."""
    system = assemble_system(state, grid, psi_vals)
    state.w = thomas_solve(system)
    state.j += 1
    return update_precipitation(state, grid, psi_vals, params)


def run(
    params: ModelParams,
    grid: Grid,
    observers: Sequence[Observer] = (),
    sample_stride: int = 1,
    extra_sample_steps: Iterable[int] = (),
) -> DiagnosticsRecord:
    """Time-step from the zero state and collect the diagnostics record.

    Samples are taken at the initial state, at every sample_stride-th
    step, at any step listed in extra_sample_steps, and at the final
    step.  Observers fire at the same points and receive (j, s_j, w, q,
    i_precip) snapshots; the arrays are live views and must not be
    mutated.  Per sample, sup_err measures the distance to the regime's
    long-time profile, h is evaluated at the full covered abscissa
    x = alpha*s_j, and gamma_tail at the half-coverage point
    x = alpha*s_j/2 (both 0 at s = 0).
    """
    if sample_stride < 1:
        raise ValueError(f"sample_stride must be >= 1, got {sample_stride!r}")
    psi_vals = psi_on_grid(params, grid)
    label, gamma, target_vals = target_on_grid(params, grid)
    state = initial_state(grid)
    record = DiagnosticsRecord(target_label=label, matched_gamma=gamma)

    def sample() -> None:
        j = state.j
        s = j * grid.d_s
        sup = float(np.max(np.abs(state.w + psi_vals - target_vals)))
        v_alpha = float(state.w[grid.n] + psi_vals[grid.n])
        if j > 0:
            h_val = _h_at_index(state.q_hist, grid.d_s, params.alpha, j)
            k0 = (j + 1) // 2
            tail = _tail_at_index(
                state.q_hist, grid.d_s, params.alpha, k0, 0.5 * params.alpha * s
            )
        else:
            h_val = 0.0
            tail = 0.0
        record.samples.append(
            DiagnosticsSample(
                s=s,
                sup_err=sup,
                v_alpha=v_alpha,
                h_val=h_val,
                gamma_tail=tail,
                extent_x=state.ignited_x,
            )
        )

    def emit() -> None:
        j = state.j
        for observer in observers:
            observer(j, j * grid.d_s, state.w, state.q, state.i_precip)
        sample()

    wanted = {0, grid.m}
    wanted.update(j for j in extra_sample_steps if 0 <= j <= grid.m)
    emit()
    for j in range(1, grid.m + 1):
        step(state, grid, psi_vals, params)
        if j % sample_stride == 0 or j in wanted:
            emit()
    return record
