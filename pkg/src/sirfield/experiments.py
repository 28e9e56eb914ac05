"""Experiment harness.

Bundles the canonical experiment configuration (JSON-friendly), the
reference initial data, discrete error norms, and the three standard
studies: step-bound tables with empirical critical steps, convergence
ladders against a refined reference, and cubature accuracy against a
closed-form disk integral.
"""

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .interpolation import Field, Grid, InterpMethod
from .model import Kernel, Params, State
from .quadrature import CubatureRule, integrate, make_rule
from .stepping import method_registry, simulate, step_bounds

_STEPPERS = ("fe", "ssprk22", "ssprk33", "ssprk104", "integral")


@dataclass
class ExperimentConfig:
    """Serializable description of one simulation setup."""

    a: float = 100.0
    b: float = 0.1
    c: float = 0.01
    delta: float = 0.05
    alpha: float = 0.0
    beta: float = 1.0
    p1: int = 20
    p2: int = 20
    l1: float = 1.0
    l2: float = 1.0
    rule_kind: str = "product"
    n_radial: int = 20
    n_angular: int | None = None
    method: str = "bilinear"
    stepper: str = "fe"
    tau: float | None = None
    tau_policy: str = "fixed"
    t_final: float = 80.0
    s0: float = 20.0
    sigma: float | None = None
    seed: int = 0
    snapshot_times: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.stepper not in _STEPPERS:
            raise ValueError(f"unknown stepper {self.stepper!r}, expected one of {_STEPPERS}")
        InterpMethod.from_name(self.method)

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        if isinstance(cfg.snapshot_times, list):
            cfg.snapshot_times = tuple(cfg.snapshot_times)
        return cfg

    @classmethod
    def from_json_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        data = asdict(self)
        data["snapshot_times"] = list(self.snapshot_times)
        return data

    def grid(self):
        return Grid.from_extent(self.p1, self.p2, self.l1, self.l2)

    def params(self):
        return Params(self.a, self.b, self.c, self.delta)

    def kernel(self):
        return Kernel(self.alpha, self.beta)

    def rule(self):
        return make_rule(self.rule_kind, self.n_radial, self.delta, self.n_angular)

    def interp(self):
        return InterpMethod.from_name(self.method)

    def state0(self):
        return initial_state(self.grid(), s0=self.s0, sigma=self.sigma)


def initial_state(grid, s0=20.0, sigma=None):
    """Canonical initial data: uniform S, one Gaussian bump of I, no R.

    The bump is a unit-mass Gaussian of width ``sigma`` (default one
    tenth of the shorter domain side) centred in the domain.
    """
    if sigma is None:
        sigma = min(grid.l1, grid.l2) / 10.0
    if not (sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    cx, cy = grid.l1 / 2.0, grid.l2 / 2.0
    norm = 1.0 / (2.0 * math.pi * sigma * sigma)

    def bump(x, y):
        return norm * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * sigma * sigma))

    return State(
        Field.full(grid, s0),
        Field.from_function(grid, bump),
        Field.zeros(grid),
        0.0,
    )


def error_norm(state_a, state_b, p=1):
    """Discrete difference norm over all three species.

    ``p`` is 1, 2, or ``inf`` (also accepts ``numpy.inf`` / ``"inf"``).
    The 1- and 2-norms carry the cell area ``h1 h2``.
    """
    if state_a.grid != state_b.grid:
        raise ValueError("states live on different grids")
    diff = np.concatenate(
        [
            (state_a.s.values - state_b.s.values).ravel(),
            (state_a.i.values - state_b.i.values).ravel(),
            (state_a.r.values - state_b.r.values).ravel(),
        ]
    )
    area = state_a.grid.h1 * state_a.grid.h2
    if p == 1:
        return float(area * np.sum(np.abs(diff)))
    if p == 2:
        return float(math.sqrt(area * np.sum(diff * diff)))
    if p in (np.inf, math.inf, "inf"):
        return float(np.max(np.abs(diff)))
    raise ValueError(f"unsupported norm order {p!r}")


def run_simulation(config, check=False, abort_on_violation=False):
    """Run the simulation described by ``config``.

    A missing ``tau`` under the fixed policy resolves to the improved
    a-priori bound of the initial state, scaled by the SSP coefficient
    for the Runge-Kutta steppers.
    """
    state = config.state0()
    params = config.params()
    kernel = config.kernel()
    rule = config.rule()
    tau = config.tau
    if tau is None and config.tau_policy == "fixed":
        rk = method_registry().get(config.stepper)
        bounds = step_bounds(state, kernel, rule, params, config.interp(), rk=rk)
        tau = bounds.rk_scaled if rk is not None else bounds.improved
    result = simulate(
        state,
        kernel,
        rule,
        params,
        config.interp(),
        config.stepper,
        config.t_final,
        tau=tau,
        tau_policy=config.tau_policy,
        check=check,
        abort_on_violation=abort_on_violation,
        snapshot_times=config.snapshot_times,
    )
    return result


@dataclass
class ConvergenceRow:
    tau: float
    error: float
    order: float


def convergence_table(config, taus, stepper=None, p=1):
    """Errors and observed orders along a halving step-size ladder.

    The reference solution is the same stepper run at half the finest
    ladder step.  ``taus`` must strictly halve from entry to entry.
    Rows report the error at each ladder step and the observed order
    ``log2(e[k-1] / e[k])`` (NaN on the first row).
    """
    taus = [float(t) for t in taus]
    if len(taus) < 2:
        raise ValueError("a convergence ladder needs at least two step sizes")
    for coarse, fine in zip(taus, taus[1:]):
        if not math.isclose(fine, coarse / 2.0, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(f"ladder must halve: {fine} is not half of {coarse}")
    stepper = config.stepper if stepper is None else stepper
    base = replace(config, stepper=stepper, tau_policy="fixed", snapshot_times=())

    def final_state(tau):
        return run_simulation(replace(base, tau=tau)).state

    reference = final_state(taus[-1] / 2.0)
    rows = []
    previous_error = None
    for tau in taus:
        err = error_norm(final_state(tau), reference, p=p)
        order = math.nan if previous_error is None else math.log2(previous_error / err)
        rows.append(ConvergenceRow(tau=tau, error=err, order=order))
        previous_error = err
    return rows


def write_convergence_csv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tau,error,order\n")
        for row in rows:
            fh.write(f"{row.tau:.17g},{row.error:.17g},{row.order:.17g}\n")


@dataclass
class BoundsRow:
    value: float
    t_tilde: float
    tau_pessimistic: float
    tau_improved: float
    tau_empirical: float
    empirical_valid: bool


def _passes_all_checks(config, tau):
    result = run_simulation(
        replace(config, tau=tau, tau_policy="fixed", snapshot_times=()),
        check=True,
        abort_on_violation=True,
    )
    return not result.aborted


def empirical_critical_tau(config, tau_lower, hi_factor=4.0, rel_tol=1e-3):
    """Bisect for the largest step size passing every per-step audit.

    Starts from the bracket ``[tau_lower, hi_factor * tau_lower]``.
    Returns ``(tau, valid)``; ``valid`` is False when the bracket did
    not actually bracket the transition, in which case ``tau`` is the
    bracket end that was reached.
    """
    lo = float(tau_lower)
    hi = hi_factor * lo
    if not _passes_all_checks(config, lo):
        return lo, False
    if _passes_all_checks(config, hi):
        return hi, False
    while (hi - lo) / lo > rel_tol:
        mid = 0.5 * (lo + hi)
        if _passes_all_checks(config, mid):
            lo = mid
        else:
            hi = mid
    return lo, True


def bounds_table(config, parameter, values, empirical=True, hi_factor=4.0, rel_tol=1e-3):
    """Step-size bound table over a sweep of one config parameter.

    For every value the improved and pessimistic a-priori bounds are
    reported; with ``empirical=True`` the observed critical step of
    forward Euler is bisected as well.
    """
    if parameter not in ("a", "delta"):
        raise ValueError(f"bounds tables sweep 'a' or 'delta', got {parameter!r}")
    rows = []
    for value in values:
        cfg = replace(config, **{parameter: float(value)}, stepper="fe")
        bounds = step_bounds(
            cfg.state0(), cfg.kernel(), cfg.rule(), cfg.params(), cfg.interp()
        )
        if empirical:
            tau_e, valid = empirical_critical_tau(
                cfg, bounds.improved, hi_factor=hi_factor, rel_tol=rel_tol
            )
        else:
            tau_e, valid = math.nan, False
        rows.append(
            BoundsRow(
                value=float(value),
                t_tilde=bounds.t_tilde,
                tau_pessimistic=bounds.pessimistic,
                tau_improved=bounds.improved,
                tau_empirical=tau_e,
                empirical_valid=valid,
            )
        )
    return rows


def write_bounds_csv(path, parameter, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{parameter},t_tilde,tau_pessimistic,tau_improved,tau_empirical\n")
        for row in rows:
            fh.write(
                f"{row.value:.17g},{row.t_tilde:.17g},{row.tau_pessimistic:.17g},"
                f"{row.tau_improved:.17g},{row.tau_empirical:.17g}\n"
            )


def intensity_integral_exact(delta, sigma=0.1, a=100.0, amplitude=100.0):
    """Closed form of the test integral used by the cubature study.

    Integrand: triangular radial kernel ``a (delta - r)``, angular
    factor ``sin(theta) + 1``, and a centred Gaussian intensity of
    total mass ``amplitude``.
    """
    return a * amplitude * (delta - sigma * math.sqrt(math.pi / 2.0) * math.erf(delta / (sigma * math.sqrt(2.0))))


@dataclass
class CubatureRow:
    kind: str
    n_radial: int
    n_angular: int
    delta: float
    approx: float
    exact: float
    error: float


def cubature_error_row(kind, n_radial, delta, n_angular=None, sigma=0.1, a=100.0, amplitude=100.0):
    """One row of the cubature accuracy study."""
    rule = make_rule(kind, n_radial, delta, n_angular)
    params = Params(a=a, b=1.0, c=0.0, delta=delta)
    kernel = Kernel(alpha=0.0, beta=1.0)  # g2 = sin(theta) + 1
    norm = amplitude / (2.0 * math.pi * sigma * sigma)

    def integrand(dx, dy):
        r = np.hypot(dx, dy)
        theta = np.arctan2(dy, dx)
        intensity = norm * np.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
        return kernel.g1(r, params) * kernel.g2(theta) * intensity

    approx = integrate(rule, integrand)
    exact = intensity_integral_exact(delta, sigma=sigma, a=a, amplitude=amplitude)
    return CubatureRow(
        kind=rule.kind,
        n_radial=rule.n_radial,
        n_angular=rule.n_angular,
        delta=rule.delta,
        approx=approx,
        exact=exact,
        error=abs(approx - exact),
    )


def cubature_error_study(
    product_n=(4, 6, 8, 10, 13, 16, 20),
    polar_deltas=(0.2, 0.1, 0.05, 0.025),
    polar_n=20,
    delta=0.05,
):
    """Accuracy study for both rule families.

    The product rule is swept in node count at fixed radius; the polar
    rule is swept in radius at fixed node count, where its square-root
    radial map shows a fixed algebraic convergence rate.
    """
    rows = [cubature_error_row("product", n, delta) for n in product_n]
    rows += [cubature_error_row("polar", polar_n, d) for d in polar_deltas]
    return rows


def write_cubature_csv(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("kind,n_radial,n_angular,delta,approx,exact,error\n")
        for row in rows:
            fh.write(
                f"{row.kind},{row.n_radial},{row.n_angular},{row.delta:.17g},"
                f"{row.approx:.17g},{row.exact:.17g},{row.error:.17g}\n"
            )
