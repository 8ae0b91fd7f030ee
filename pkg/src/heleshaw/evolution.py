"""Hele-Shaw evolution of disk maps in string-normalized time.

Time is normalized so that dM_0/dt = 1 with all higher moments conserved,
i.e. the flow realizes d/dt = d/dM_0 and the bracket satisfies
{f, f*}_t = 1.  The classical Polubarinova-Galin normalization
Re[fdot conj(z f')] = 1 corresponds to dM_0/dt = 2; a solution in that time
variable tau is obtained from ours by f_PG(tau) = f(2 tau).

Two steppers, both fixed-step RK4:

* :func:`step_polynomial` keeps f a polynomial of fixed degree and advances
  the coefficients with the velocities from the bracket linear system.
  Branch points move implicitly.
* :func:`step_taylor_fixed_branch` advances a truncated power series with
  fdot = z f'(z) P(z), P the Poisson-Schwarz (Herglotz) extension of the
  boundary data 1/(2 |f'|^2).  Since fdot vanishes at every zero of f' the
  branch-point images B_j = f(omega_j) stay fixed; their drift is measured
  and reported, never enforced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    BranchPointError,
    ConfigError,
    CuspError,
    DegenerateResultantError,
    HeleShawError,
    NormalizationError,
    TruncationError,
)
from .maps import (
    AnalyticMap,
    CircleGrid,
    PolynomialMap,
    TaylorMap,
    simple_derivative_zeros_in_disk,
)
from .moments import moments_richardson
from .bracket import (
    bracket_samples,
    derivative_reflection_resultant,
    solve_string_system,
    velocities_positive,
)

__all__ = [
    "HerglotzFunction",
    "poisson_schwarz",
    "BranchPointSet",
    "branch_points",
    "EvolutionState",
    "StepDiagnostics",
    "step_polynomial",
    "step_taylor_fixed_branch",
    "step_error_estimate",
    "EvolutionResult",
    "run_evolution",
]


# ----------------------------------------------------------------------
# Poisson-Schwarz integral
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HerglotzFunction:
    """Analytic P(z) = p_0 + p_1 z + ... on the disk with Im p_0 = 0.

    Constructed so that Re P on the unit circle matches prescribed (positive)
    boundary data.
    """

    coeffs: tuple

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    def real_part_on(self, grid: CircleGrid) -> np.ndarray:
        return np.real(self(grid.nodes))


def poisson_schwarz(
    m: AnalyticMap,
    grid: CircleGrid,
    n_modes: int | None = None,
    tol: Tolerances = DEFAULT,
) -> HerglotzFunction:
    """Analytic extension P of the boundary data 1/(2 |f'|^2).

    P(z) = (1/2 pi) int rho(theta) (w + z)/(w - z) dtheta with w = e^{i theta}
    and rho = 1/(2|f'|^2); in Fourier terms p_0 = rho_hat_0 (real) and
    p_m = 2 rho_hat_m for m >= 1.  Spectrally accurate for f' analytic and
    zero-free on the circle.
    """
    fpv = m.derivative_rational()(grid.nodes)
    small = float(np.min(np.abs(fpv)))
    if small < tol.cusp_min_derivative:
        raise CuspError(f"min |f'| = {small:.3e} on the circle (cusp forming)")
    rho = 1.0 / (2.0 * np.abs(fpv) ** 2)
    hat = np.fft.fft(rho) / grid.size
    if n_modes is None:
        n_modes = grid.size // 2 - 1
    n_modes = min(n_modes, grid.size // 2 - 1)
    coeffs = np.zeros(n_modes + 1, dtype=complex)
    coeffs[0] = hat[0].real
    coeffs[1:] = 2.0 * hat[1 : n_modes + 1]
    return HerglotzFunction(tuple(coeffs))


# ----------------------------------------------------------------------
# branch points
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class BranchPointSet:
    """Zeros omega_j of f' in the disk with their images B_j = f(omega_j)."""

    omegas: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.omegas)

    def pairs(self):
        return list(zip(self.omegas, self.values))


def branch_points(
    m: AnalyticMap, near=None, tol: Tolerances = DEFAULT, cross_check: bool = True
) -> BranchPointSet:
    """Branch points of the map: simple zeros of f' inside the unit disk.

    Each image is computed both directly as f(omega_j) and as the residue of
    f f'' / f' at omega_j; disagreement beyond 1e-9 raises, since it means
    the zero is not resolved.  Pass the previous zeros as ``near`` to keep
    trajectories continuous along an evolution.
    """
    omegas = simple_derivative_zeros_in_disk(m, near=near, tol=tol)
    if omegas.size == 0:
        return BranchPointSet(omegas, np.zeros(0, dtype=complex))
    r = m.rational()
    direct = np.asarray([r(w) for w in omegas], dtype=complex)
    if cross_check:
        fp = r.derivative()
        integrand = r * fp.derivative() / fp
        scale = max(float(np.max(np.abs(direct))), 1.0)
        for w, bv in zip(omegas, direct):
            res = integrand.residue(w, order=1)
            if abs(res - bv) > 1e-9 * scale:
                raise BranchPointError(
                    f"branch value mismatch at {w}: f(omega) = {bv}, "
                    f"residue = {res}"
                )
    return BranchPointSet(omegas, direct)


# ----------------------------------------------------------------------
# states and steppers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class StepDiagnostics:
    """Per-snapshot moment values and deviations from the conserved ones."""

    moments: np.ndarray
    moment_drift: np.ndarray
    branch_drift: np.ndarray
    string_residual: float
    dt: float

    @property
    def max_moment_drift(self) -> float:
        return float(np.max(self.moment_drift)) if self.moment_drift.size else 0.0

    @property
    def max_branch_drift(self) -> float:
        return float(np.max(self.branch_drift)) if self.branch_drift.size else 0.0


@dataclass(frozen=True)
class EvolutionState:
    t: float
    map: AnalyticMap
    diagnostics: StepDiagnostics | None = None


def _rk4(a: np.ndarray, dt: float, deriv) -> np.ndarray:
    k1 = deriv(a)
    k2 = deriv(a + 0.5 * dt * k1)
    k3 = deriv(a + 0.5 * dt * k2)
    k4 = deriv(a + dt * k3)
    return a + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def _enforce_normalization(a: np.ndarray, tol: Tolerances) -> np.ndarray:
    drift = abs(a[0].imag)
    if drift > tol.normalization_drift:
        raise NormalizationError(
            f"Im a0 = {drift:.3e} after step; the exact flow preserves "
            "normalization, so this indicates a broken step"
        )
    a = a.copy()
    a[0] = a[0].real
    return a


def step_polynomial(
    state: EvolutionState, dt: float, tol: Tolerances = DEFAULT
) -> EvolutionState:
    """One RK4 step of the fixed-degree polynomial string flow.

    Besides the conditioning check inside the linear solve, the step guards
    against tunneling through the Res(f', f'*) = 0 shell: the resultant
    vanishes like sqrt(t* - t) at the blow-up time, so a fixed step can jump
    across the singular set without ever landing on it.  A step that moves
    the resultant by more than its own magnitude is rejected as degenerate.
    """
    m = state.map
    if not isinstance(m, PolynomialMap):
        raise TypeError("polynomial stepper needs a PolynomialMap state")

    def deriv(a):
        try:
            cur = PolynomialMap(tuple(a))
        except ValueError as exc:
            raise NormalizationError(
                f"stage left the admissible coefficient cone: {exc}"
            ) from exc
        return velocities_positive(solve_string_system(cur, tol=tol))

    a = np.asarray(m.coeffs, dtype=complex)
    res0 = derivative_reflection_resultant(m)
    anew = _enforce_normalization(_rk4(a, dt, deriv), tol)
    newmap = PolynomialMap(tuple(anew))
    res1 = derivative_reflection_resultant(newmap)
    if abs(res1 - res0) > 0.5 * (abs(res0) + abs(res1)):
        raise DegenerateResultantError(
            f"Res(f', f'*) jumped from {res0:.3e} to {res1:.3e} in one step; "
            "the flow crossed or skirted the degenerate shell"
        )
    return EvolutionState(state.t + dt, newmap)


def step_taylor_fixed_branch(
    state: EvolutionState,
    dt: float,
    grid: CircleGrid | None = None,
    tol: Tolerances = DEFAULT,
) -> EvolutionState:
    """One RK4 step of the fixed-branch-point flow in series space.

    The velocity is the truncation of fdot = z f' P to the series order.
    The new state is tail-checked: if the relative energy in the trailing
    coefficients exceeds tolerance the series order is insufficient.
    """
    m = state.map
    if not isinstance(m, TaylorMap):
        raise TypeError("series stepper needs a TaylorMap state")
    if grid is None:
        grid = CircleGrid(1024)
    order = m.order

    def deriv(a):
        cur = TaylorMap(tuple(a))
        p = poisson_schwarz(cur, grid, n_modes=order - 1, tol=tol)
        b = a * np.arange(1, order + 1)
        return np.convolve(b, np.asarray(p.coeffs))[:order]

    a = np.asarray(m.coeffs, dtype=complex)
    anew = _enforce_normalization(_rk4(a, dt, deriv), tol)
    newmap = TaylorMap(tuple(anew))
    tail = newmap.tail_energy()
    if tail > tol.tail_energy:
        raise TruncationError(
            f"relative tail energy {tail:.3e} exceeds {tol.tail_energy}; "
            "increase the series order"
        )
    return EvolutionState(state.t + dt, newmap)


def taylor_velocity(m: TaylorMap, grid: CircleGrid, tol: Tolerances = DEFAULT):
    """Coefficient velocities of the fixed-branch-point flow (diagnostics)."""
    p = poisson_schwarz(m, grid, n_modes=m.order - 1, tol=tol)
    b = np.asarray(m.coeffs, dtype=complex) * np.arange(1, m.order + 1)
    return np.convolve(b, np.asarray(p.coeffs))[: m.order]


def step_error_estimate(state: EvolutionState, dt: float, stepper, **kwargs) -> float:
    """A-posteriori step error: one full step against two half steps.

    Returns the max coefficient difference, which scales like dt^5 for the
    RK4 steppers and serves as a cheap accuracy probe for a chosen dt.
    """
    full = stepper(state, dt, **kwargs)
    half = stepper(stepper(state, 0.5 * dt, **kwargs), 0.5 * dt, **kwargs)
    a1 = np.asarray(full.map.coeffs, dtype=complex)
    a2 = np.asarray(half.map.coeffs, dtype=complex)
    n = max(len(a1), len(a2))
    a1 = np.pad(a1, (0, n - len(a1)))
    a2 = np.pad(a2, (0, n - len(a2)))
    return float(np.max(np.abs(a1 - a2)))


# ----------------------------------------------------------------------
# driver
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EvolutionResult:
    """Snapshots at the requested output times plus the stop disposition."""

    states: tuple
    stop_reason: str
    base_moments: np.ndarray
    base_branch_values: np.ndarray

    @property
    def completed(self) -> bool:
        return self.stop_reason == "completed"


def _steps_for(t: float, dt: float, what: str) -> int:
    k = round(t / dt)
    if abs(k * dt - t) > 1e-9:
        raise ConfigError(f"{what} = {t} is not a multiple of dt = {dt}")
    return k


def run_evolution(spec) -> EvolutionResult:
    """Run the scenario's evolution, collecting snapshots and diagnostics.

    Accepts a :class:`heleshaw.scenarios.ScenarioSpec`.  Any typed failure
    (degeneracy, cusp, truncation, branch trouble) stops the run cleanly; the
    exception class name becomes the stop reason and the snapshots collected
    so far are returned.
    """
    from . import scenarios  # deferred: scenarios does not import this module

    m, mode = scenarios.initial_map(spec)
    tol = spec.tolerances
    grid = CircleGrid(spec.grid_n)
    if mode == "taylor" and not isinstance(m, TaylorMap):
        m = TaylorMap(tuple(m.power_series(spec.taylor_order)))
        tail = m.tail_energy()
        if tail > tol.tail_energy:
            raise TruncationError(
                f"initial series tail energy {tail:.3e} exceeds {tol.tail_energy}"
            )

    K = max(spec.diagnostic_moments, 1)
    base = moments_richardson(m, K).as_array()
    if mode == "taylor":
        bp = branch_points(m, tol=tol)
        base_branch = bp.values
        prev_omegas = bp.omegas
    else:
        base_branch = np.zeros(0, dtype=complex)
        prev_omegas = None

    def annotate(state: EvolutionState, dt: float) -> EvolutionState:
        nonlocal prev_omegas
        mv = moments_richardson(state.map, K).as_array()
        expected = base.copy()
        expected[0] += state.t
        drift = np.abs(mv - expected)
        if mode == "taylor":
            bpt = branch_points(state.map, near=prev_omegas, tol=tol)
            prev_omegas = bpt.omegas
            bdrift = (
                np.abs(bpt.values - base_branch)
                if len(bpt) == len(base_branch)
                else np.full(max(len(base_branch), 1), np.inf)
            )
            vel = taylor_velocity(state.map, grid, tol=tol)
        else:
            bdrift = np.zeros(0)
            vel = velocities_positive(solve_string_system(state.map, tol=tol))
        sres = float(np.max(np.abs(bracket_samples(state.map, vel, grid) - 1.0)))
        return EvolutionState(
            state.t,
            state.map,
            StepDiagnostics(mv, drift, bdrift, sres, dt),
        )

    n_steps = _steps_for(spec.horizon, spec.dt, "horizon")
    out_steps = {_steps_for(t, spec.dt, "output time") for t in spec.output_times}
    if out_steps and max(out_steps) > n_steps:
        raise ConfigError("output time beyond the horizon")
    out_steps |= {0, n_steps}
    state = EvolutionState(0.0, m)
    states = [annotate(state, spec.dt)]
    stop = "completed"
    for k in range(1, n_steps + 1):
        try:
            if mode == "taylor":
                state = step_taylor_fixed_branch(state, spec.dt, grid=grid, tol=tol)
            else:
                state = step_polynomial(state, spec.dt, tol=tol)
            state = EvolutionState(round(k * spec.dt, 12), state.map)
            if k in out_steps:
                states.append(annotate(state, spec.dt))
        except HeleShawError as exc:
            stop = f"{type(exc).__name__}: {exc}"
            break
    return EvolutionResult(tuple(states), stop, base, base_branch)
