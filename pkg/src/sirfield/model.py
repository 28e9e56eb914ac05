"""Spatially nonlocal SIR dynamics on a uniform grid.

The infection pressure at a point is a weighted disk average of the
infected density,

    T(x, y) = integral over the radius-delta disk of
              g1(r) g2(theta) I(x + r cos theta, y + r sin theta),

with a triangular radial profile ``g1(r) = a (delta - r)`` inside the
disk and an angular modulation ``g2(theta) = beta sin(theta + alpha) +
beta``.  The continuous system is

    dS/dt = -S T - c S,   dI/dt = S T - b I,   dR/dt = b I + c S,

where ``b`` is the recovery rate and ``c`` a direct removal
(vaccination) rate.  On the grid the integral is replaced by a disk
cubature rule applied to an off-grid interpolant of I, extended by
zero outside the domain.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .interpolation import Field, InterpMethod, _SplineSampler


@dataclass(frozen=True)
class Params:
    """Model rates: infectivity scale ``a``, recovery ``b``, removal
    ``c``, interaction radius ``delta``."""

    a: float
    b: float
    c: float
    delta: float

    def __post_init__(self):
        for name in ("a", "b", "c", "delta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"parameter {name} must be finite, got {value}")
            if value < 0.0:
                raise ValueError(f"parameter {name} must be nonnegative, got {value}")
        if self.a <= 0.0 or self.delta <= 0.0:
            raise ValueError(f"a and delta must be positive, got a={self.a}, delta={self.delta}")


@dataclass(frozen=True)
class Kernel:
    """Angular kernel parameters; the radial part comes from :class:`Params`."""

    alpha: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError(f"kernel parameters must be finite, got {self}")
        if self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    def g1(self, r, params):
        """Triangular radial profile ``a (delta - r)``, zero for ``r >= delta``."""
        r = np.asarray(r, dtype=np.float64)
        return np.where(r < params.delta, params.a * (params.delta - r), 0.0)

    def g2(self, theta):
        """Shifted sine angular profile, ranging over ``[0, 2 beta]``."""
        return self.beta * np.sin(np.asarray(theta, dtype=np.float64) + self.alpha) + self.beta

    def kappa1(self, params):
        """Upper bound of the radial profile."""
        return params.a * params.delta

    def kappa2(self):
        """Upper bound of the angular profile."""
        return 2.0 * self.beta


@dataclass
class State:
    """Susceptible, infected, and recovered fields at time ``t``."""

    s: Field
    i: Field
    r: Field
    t: float = 0.0

    def __post_init__(self):
        if not (self.s.grid == self.i.grid == self.r.grid):
            raise ValueError("state fields must share one grid")

    @property
    def grid(self):
        return self.s.grid

    def total(self):
        """Node-wise total density S + I + R."""
        return self.s.values + self.i.values + self.r.values

    def m_tilde(self):
        """Largest node total, the density scale of the state."""
        return float(np.max(self.total()))

    def copy(self):
        return State(self.s.copy(), self.i.copy(), self.r.copy(), self.t)


class TransmissionOperator:
    """Evaluates the infection pressure T on every grid node.

    The cubature/interpolation structure depends only on the grid, the
    rule, and the kernel, so it is precomputed once and then applied to
    any infected field on that grid.  For bilinear interpolation on a
    uniform grid the whole operator collapses to one cross-correlation
    with a small combined stencil (each cubature point contributes its
    coefficient times the four bilinear corner weights); the other
    methods sample the interpolant at every node-plus-offset point.
    """

    def __init__(self, grid, rule, kernel, params, method=InterpMethod.BILINEAR):
        method = InterpMethod.from_name(method) if not isinstance(method, InterpMethod) else method
        if not (rule.delta == params.delta):
            raise ValueError(
                f"cubature rule radius {rule.delta} does not match params.delta {params.delta}"
            )
        self.grid = grid
        self.rule = rule
        self.kernel = kernel
        self.params = params
        self.method = method
        self.coeff = rule.weight * kernel.g1(rule.r, params) * kernel.g2(rule.theta)
        self.coeff_sum = float(np.sum(self.coeff))
        self._ghost = int(math.ceil(params.delta / min(grid.h1, grid.h2))) + 1
        if method is InterpMethod.BILINEAR:
            self._init_stencil(grid, rule)
        else:
            self._init_queries(grid, rule)

    def _init_stencil(self, grid, rule):
        u = rule.dx / grid.h1
        v = rule.dy / grid.h2
        iu = np.floor(u).astype(np.int64)
        jv = np.floor(v).astype(np.int64)
        fu = u - iu
        fv = v - jv
        lo1, hi1 = int(iu.min()), int(iu.max()) + 1
        lo2, hi2 = int(jv.min()), int(jv.max()) + 1
        stencil = np.zeros((hi1 - lo1 + 1, hi2 - lo2 + 1))
        for di, wx in ((0, 1.0 - fu), (1, fu)):
            for dj, wy in ((0, 1.0 - fv), (1, fv)):
                np.add.at(stencil, (iu + di - lo1, jv + dj - lo2), self.coeff * wx * wy)
        self._stencil = stencil
        self._pad1 = (max(0, -lo1), max(0, hi1))
        self._pad2 = (max(0, -lo2), max(0, hi2))
        self._anchor = (self._pad1[0] + lo1, self._pad2[0] + lo2)

    def _init_queries(self, grid, rule):
        # fractional index coordinates of every node-plus-offset point,
        # flattened in node-major order
        u = np.arange(grid.p1)[:, None, None] + (rule.dx / grid.h1)[None, None, :]
        v = np.arange(grid.p2)[None, :, None] + (rule.dy / grid.h2)[None, None, :]
        shape = (grid.p1, grid.p2, rule.n_points)
        self._qu = np.ascontiguousarray(np.broadcast_to(u, shape).reshape(-1))
        self._qv = np.ascontiguousarray(np.broadcast_to(v, shape).reshape(-1))
        self._qx = self._qu * grid.h1
        self._qy = self._qv * grid.h2

    def __call__(self, i_values):
        grid = self.grid
        i_values = np.asarray(i_values, dtype=np.float64)
        if i_values.shape != (grid.p1, grid.p2):
            raise ValueError(
                f"expected values shaped {(grid.p1, grid.p2)}, got {i_values.shape}"
            )
        if self.method is InterpMethod.BILINEAR:
            padded = np.pad(i_values, (self._pad1, self._pad2))
            a1, a2 = self._anchor
            k1, k2 = self._stencil.shape
            window = padded[a1 : a1 + grid.p1 + k1 - 1, a2 : a2 + grid.p2 + k2 - 1]
            return backend.correlate_valid(np.ascontiguousarray(window), self._stencil)
        if self.method is InterpMethod.MONOTONE_CUBIC:
            samples = backend.makima_many(np.ascontiguousarray(i_values), self._qu, self._qv)
        else:
            sampler = _SplineSampler(Field(grid, i_values), ghost=self._ghost)
            samples = sampler.ev(self._qx, self._qy)
        samples = samples.reshape(grid.p1, grid.p2, self.rule.n_points)
        return np.sum(samples * self.coeff, axis=2)

    def apply(self, i_field):
        """Infection pressure of an infected :class:`Field` as a Field."""
        return Field(self.grid, self(i_field.values))


def assemble_T(i_field, kernel, rule, params, method=InterpMethod.BILINEAR):
    """One-shot infection pressure for ``i_field``.

    Builds a fresh :class:`TransmissionOperator`; for repeated
    evaluations on the same grid construct the operator once instead.
    """
    op = TransmissionOperator(i_field.grid, rule, kernel, params, method)
    return op.apply(i_field)


def rhs_arrays(s, i, r, t_values, params):
    """Raw right-hand side given precomputed infection pressure."""
    infection = s * t_values
    ds = -infection - params.c * s
    di = infection - params.b * i
    dr = params.b * i + params.c * s
    return ds, di, dr


def rhs(state, kernel, rule, params, method=InterpMethod.BILINEAR):
    """Right-hand side fields of the semi-discrete system at ``state``."""
    t_field = assemble_T(state.i, kernel, rule, params, method)
    ds, di, dr = rhs_arrays(state.s.values, state.i.values, state.r.values, t_field.values, params)
    grid = state.grid
    return Field(grid, ds), Field(grid, di), Field(grid, dr)
