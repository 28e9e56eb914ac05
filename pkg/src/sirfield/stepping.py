"""Time integration for the nonlocal SIR system.

Explicit steppers in Shu-Osher form.  Every stage of the strong
stability preserving (SSP) methods is a convex combination of forward
Euler substeps of length ``tau / C``, where ``C`` is the method's SSP
coefficient; consequently any step size that keeps a single forward
Euler step inside the positive cone also keeps the full method there
after scaling by ``C``.

Step-size bounds are exposed at three levels of knowledge about the
data: an *adaptive* per-step bound from the current infection
pressure, an *improved* a-priori bound that replaces the pressure by
its sharp upper envelope ``sum(w g1 g2) * m_tilde``, and a
*pessimistic* a-priori bound that only uses the kernel caps
``kappa1, kappa2`` and the density scale, predating any cubature
evaluation.  All three guarantee the structural properties
(nonnegativity, conservation, monotone S and R) for forward Euler.

An integral-recursion scheme is included as the positivity baseline:
it updates S through an exponential factor and closes the step with
exact conservation, at the price of first-order accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .interpolation import Field, InterpMethod
from .model import State, TransmissionOperator, rhs_arrays

# effective cubature mass per unit kernel cap, worst case over the
# triangular-radial / shifted-sine family (area fraction of the disk
# where the product kernel sits above its mean)
WORST_CASE_MASS = (1.0 - 0.5 * math.sqrt(2.0)) * math.pi

MAX_SIMULATION_STEPS = 10_000_000


@dataclass(frozen=True)
class RKMethod:
    """Explicit SSP Runge-Kutta tableau in Shu-Osher form.

    Stage ``q[0]`` is the previous solution.  Stage ``q[i]`` for
    ``i >= 1`` is ``v[i] * q[0] + sum_j alpha[i][j] * (q[j] + (tau/C) F(q[j]))``
    over ``j < i``; the last stage is the new solution.  ``v[0]`` is 1
    and ``alpha[0]`` is empty by convention.  All coefficients are
    nonnegative and every stage row sums to one, which is what makes
    each stage a convex combination of Euler substeps.
    """

    name: str
    order: int
    ssp_coefficient: float
    v: tuple
    alpha: tuple

    @property
    def stages(self):
        return len(self.v) - 1

    def validate(self, tol=1e-15):
        """Check shape, nonnegativity, and row consistency."""
        if len(self.alpha) != len(self.v):
            raise ValueError(f"{self.name}: alpha and v disagree on stage count")
        if self.v[0] != 1.0 or self.alpha[0] != ():
            raise ValueError(f"{self.name}: stage 0 must be the identity stage")
        for i in range(1, len(self.v)):
            row = self.alpha[i]
            if len(row) != i:
                raise ValueError(f"{self.name}: alpha row {i} must have {i} entries")
            if self.v[i] < 0.0 or any(a < 0.0 for a in row):
                raise ValueError(f"{self.name}: negative coefficient in stage {i}")
            if abs(self.v[i] + sum(row) - 1.0) > tol:
                raise ValueError(f"{self.name}: stage {i} is not a convex combination")
        if not (self.ssp_coefficient > 0.0):
            raise ValueError(f"{self.name}: SSP coefficient must be positive")
        return True

    def butcher(self):
        """Equivalent Butcher data ``(A, b, c)``.

        Unrolling the Shu-Osher recursion: with ``ahat`` the strictly
        lower-triangular matrix of alpha coefficients over all stages
        (the new solution treated as stage m+1), the full coefficient
        matrix is ``(I - ahat)^{-1} ahat / C`` and its last row is the
        weight vector ``b``.
        """
        m1 = len(self.v)
        ahat = np.zeros((m1, m1))
        for i in range(1, m1):
            ahat[i, : len(self.alpha[i])] = self.alpha[i]
        full = np.linalg.solve(np.eye(m1) - ahat, ahat) / self.ssp_coefficient
        a = full[:-1, :-1]
        b = full[-1, :-1]
        c = a.sum(axis=1)
        return a, b, c

    def order_condition_residuals(self):
        """Residuals of the Butcher order conditions through order 4.

        Returns a dict mapping order to the largest absolute residual
        of that order's conditions; entries exist up to ``self.order``.
        """
        a, b, c = self.butcher()
        conditions = {
            1: [b.sum() - 1.0],
            2: [b @ c - 0.5],
            3: [b @ c**2 - 1.0 / 3.0, b @ a @ c - 1.0 / 6.0],
            4: [
                b @ c**3 - 0.25,
                (b * c) @ a @ c - 0.125,
                b @ a @ c**2 - 1.0 / 12.0,
                b @ a @ a @ c - 1.0 / 24.0,
            ],
        }
        return {p: max(abs(r) for r in res) for p, res in conditions.items() if p <= self.order}


SSPRK22 = RKMethod(
    name="ssprk22",
    order=2,
    ssp_coefficient=1.0,
    v=(1.0, 0.0, 0.5),
    alpha=((), (1.0,), (0.0, 0.5)),
)

SSPRK33 = RKMethod(
    name="ssprk33",
    order=3,
    ssp_coefficient=1.0,
    v=(1.0, 0.0, 0.75, 1.0 / 3.0),
    alpha=((), (1.0,), (0.0, 0.25), (0.0, 0.0, 2.0 / 3.0)),
)

# ten-stage fourth-order method with SSP coefficient 6: four Euler
# links, one mixing stage, four more links, and a three-way final
# combination
SSPRK104 = RKMethod(
    name="ssprk104",
    order=4,
    ssp_coefficient=6.0,
    v=(1.0, 0.0, 0.0, 0.0, 0.0, 0.6, 0.0, 0.0, 0.0, 0.0, 0.04),
    alpha=(
        (),
        (1.0,),
        (0.0, 1.0),
        (0.0, 0.0, 1.0),
        (0.0, 0.0, 0.0, 1.0),
        (0.0, 0.0, 0.0, 0.0, 0.4),
        (0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0),
        (0.0, 0.0, 0.0, 0.0, 0.36, 0.0, 0.0, 0.0, 0.0, 0.6),
    ),
)


def method_registry():
    """Named SSP Runge-Kutta methods."""
    return {m.name: m for m in (SSPRK22, SSPRK33, SSPRK104)}


def _stage_arrays(state):
    return state.s.values, state.i.values, state.r.values


def euler_step(state, op, params, tau, t_values=None):
    """One forward Euler step of length ``tau``."""
    s, i, r = _stage_arrays(state)
    if t_values is None:
        t_values = op(i)
    ds, di, dr = rhs_arrays(s, i, r, t_values, params)
    grid = state.grid
    return State(
        Field(grid, s + tau * ds),
        Field(grid, i + tau * di),
        Field(grid, r + tau * dr),
        state.t + tau,
    )


def ssp_rk_step(state, op, params, tau, method):
    """One step of an SSP Runge-Kutta method in Shu-Osher form."""
    h = tau / method.ssp_coefficient
    grid = state.grid
    q = [_stage_arrays(state)]
    euler_of = {}

    def euler_sub(j):
        # q[j] + h F(q[j]), computed once per referenced stage
        if j not in euler_of:
            s, i, r = q[j]
            ds, di, dr = rhs_arrays(s, i, r, op(i), params)
            euler_of[j] = (s + h * ds, i + h * di, r + h * dr)
        return euler_of[j]

    for stage in range(1, method.stages + 1):
        vi = method.v[stage]
        acc = [vi * q[0][0], vi * q[0][1], vi * q[0][2]]
        for j, aij in enumerate(method.alpha[stage]):
            if aij != 0.0:
                sub = euler_sub(j)
                for comp in range(3):
                    acc[comp] = acc[comp] + aij * sub[comp]
        q.append(tuple(acc))
    s, i, r = q[-1]
    return State(Field(grid, s), Field(grid, i), Field(grid, r), state.t + tau)


def integral_step(state, op, params, tau):
    """One step of the integral-recursion baseline scheme.

    S decays through an exponential factor, R accumulates, and I closes
    the node-wise balance exactly; requires ``tau <= 1/b``.
    """
    if params.b > 0.0 and tau > 1.0 / params.b:
        raise ValueError(
            f"integral scheme requires tau <= 1/b = {1.0 / params.b}, got tau={tau}"
        )
    s, i, r = _stage_arrays(state)
    t_values = op(i)
    total = s + i + r
    s_new = s * np.exp(-tau * (t_values + params.c))
    r_new = r + params.b * tau * i + params.c * tau * s_new
    i_new = total - s_new - r_new
    grid = state.grid
    return State(Field(grid, s_new), Field(grid, i_new), Field(grid, r_new), state.t + tau)


def adaptive_bound(t_values, params):
    """Largest Euler step with the current infection pressure.

    ``min over nodes of 1/(T + c)``, additionally capped by ``1/b``.
    """
    cap = np.min(1.0 / (np.asarray(t_values) + params.c))
    if params.b > 0.0:
        cap = min(cap, 1.0 / params.b)
    return float(cap)


@dataclass(frozen=True)
class StepBounds:
    """A-priori step-size bounds for a given initial state.

    ``t_tilde`` is the sharp envelope of the infection pressure,
    ``improved`` the Euler bound built from it, ``pessimistic`` the
    kernel-cap-only bound, ``adaptive_initial`` the bound the adaptive
    controller would take on the first step, and ``rk_scaled`` the
    improved bound times the SSP coefficient when a method was given.
    """

    t_tilde: float
    improved: float
    pessimistic: float
    adaptive_initial: float
    rk_scaled: float | None = None


def step_bounds(state, kernel, rule, params, method=InterpMethod.BILINEAR, rk=None):
    """Compute :class:`StepBounds` for ``state``."""
    op = TransmissionOperator(state.grid, rule, kernel, params, method)
    m_tilde = state.m_tilde()
    t_tilde = op.coeff_sum * m_tilde
    inv_b = 1.0 / params.b if params.b > 0.0 else math.inf
    improved = min(1.0 / (t_tilde + params.c), inv_b)
    worst_pressure = (
        WORST_CASE_MASS * params.delta**2 * kernel.kappa1(params) * kernel.kappa2() * m_tilde
    )
    worst_pressure = max(worst_pressure, t_tilde)
    pessimistic = min(1.0 / (worst_pressure + params.c), inv_b)
    adaptive_initial = adaptive_bound(op(state.i.values), params)
    rk_scaled = rk.ssp_coefficient * improved if rk is not None else None
    return StepBounds(
        t_tilde=t_tilde,
        improved=improved,
        pessimistic=pessimistic,
        adaptive_initial=adaptive_initial,
        rk_scaled=rk_scaled,
    )


@dataclass
class SimulationResult:
    """Final state plus bookkeeping from :func:`simulate`."""

    state: State
    steps: int
    aborted: bool = False
    violation_step: int | None = None
    reports: list | None = None
    snapshots: dict | None = None


def simulate(
    state,
    kernel,
    rule,
    params,
    method,
    stepper,
    t_final,
    tau=None,
    tau_policy="fixed",
    check=False,
    abort_on_violation=False,
    tol_conservation=1e-12,
    snapshot_times=(),
):
    """March ``state`` to ``t_final`` and return a :class:`SimulationResult`.

    ``stepper`` is one of ``"fe"``, ``"ssprk22"``, ``"ssprk33"``,
    ``"ssprk104"``, ``"integral"``.  With ``tau_policy="fixed"`` a step
    size ``tau`` is required; ``"adaptive"`` recomputes the Euler bound
    from the current pressure each step and is only defined for
    forward Euler.  The final step (and steps hitting requested
    snapshot times) are clipped so the march lands on the targets
    exactly.  With ``check=True`` every step is audited and the reports
    returned; ``abort_on_violation`` stops at the first failed audit.
    """
    from .properties import check_step

    if t_final < state.t:
        raise ValueError(f"t_final={t_final} is before the state time {state.t}")
    registry = method_registry()
    if stepper not in ("fe", "integral") and stepper not in registry:
        raise ValueError(f"unknown stepper {stepper!r}")
    if tau_policy not in ("fixed", "adaptive"):
        raise ValueError(f"unknown tau policy {tau_policy!r}")
    if tau_policy == "adaptive" and stepper != "fe":
        raise ValueError("the adaptive step policy is only defined for forward Euler")
    if tau_policy == "fixed":
        if tau is None or not (tau > 0.0):
            raise ValueError(f"fixed stepping needs a positive tau, got {tau}")

    op = TransmissionOperator(state.grid, rule, kernel, params, method)
    requested = {float(t) for t in snapshot_times if state.t < float(t) <= t_final}
    targets = sorted(requested | {float(t_final)})
    snapshots = {}
    reports = [] if check else None
    steps = 0
    current = state

    for target in targets:
        while current.t < target:
            if steps >= MAX_SIMULATION_STEPS:
                raise RuntimeError(f"exceeded {MAX_SIMULATION_STEPS} steps before t_final")
            remaining = target - current.t
            if tau_policy == "adaptive":
                t_values = op(current.i.values)
                step_tau = min(adaptive_bound(t_values, params), remaining)
                nxt = euler_step(current, op, params, step_tau, t_values=t_values)
            else:
                step_tau = min(tau, remaining)
                if stepper == "fe":
                    nxt = euler_step(current, op, params, step_tau)
                elif stepper == "integral":
                    nxt = integral_step(current, op, params, step_tau)
                else:
                    nxt = ssp_rk_step(current, op, params, step_tau, registry[stepper])
            # land exactly on the target when the clipped step reaches it
            if step_tau == remaining:
                nxt.t = target
            steps += 1
            if check:
                report = check_step(current, nxt, step_index=steps, tol_conservation=tol_conservation)
                reports.append(report)
                if abort_on_violation and not report.ok:
                    return SimulationResult(
                        state=nxt,
                        steps=steps,
                        aborted=True,
                        violation_step=steps,
                        reports=reports,
                        snapshots=snapshots,
                    )
            current = nxt
        if target in requested:
            snapshots[target] = current.copy()
    return SimulationResult(
        state=current, steps=steps, reports=reports, snapshots=snapshots
    )
