"""Structural property audits for discrete SIR states.

Four properties are checked per step, node-wise:

* D1 - nonnegativity of S, I, R in the new state;
* D2 - conservation of the node total S + I + R across the step;
* D3 - S never increases;
* D4 - R never decreases.

Tolerances scale with the data: the sign checks allow an absolute
slack of ``tol_negative`` (default ``1e-12`` times the density scale
of the previous state) and conservation is judged relative to the
largest node total.
"""

from dataclasses import dataclass

import numpy as np

_CSV_HEADER = "step,d1,d2,d3,d4,worst_negative,conservation_drift"


@dataclass
class PropertyReport:
    """Audit outcome for one step."""

    step_index: int
    d1: bool
    d2: bool
    d3: bool
    d4: bool
    worst_negative: float
    conservation_drift: float
    location: tuple | None = None

    @property
    def ok(self):
        return self.d1 and self.d2 and self.d3 and self.d4

    def csv_row(self):
        return (
            f"{self.step_index},{int(self.d1)},{int(self.d2)},{int(self.d3)},{int(self.d4)},"
            f"{self.worst_negative:.17g},{self.conservation_drift:.17g}"
        )


def check_step(prev, new, step_index=0, tol_negative=None, tol_conservation=1e-12):
    """Audit the transition ``prev -> new``; returns a :class:`PropertyReport`."""
    scale = max(prev.m_tilde(), np.finfo(np.float64).tiny)
    if tol_negative is None:
        tol_negative = 1e-12 * scale

    arrays = {"s": new.s.values, "i": new.i.values, "r": new.r.values}
    worst_negative = float(min(a.min() for a in arrays.values()))
    d1 = worst_negative >= -tol_negative

    drift_field = np.abs(new.total() - prev.total())
    conservation_drift = float(drift_field.max() / scale)
    d2 = conservation_drift <= tol_conservation

    s_growth = new.s.values - prev.s.values
    d3 = float(s_growth.max()) <= tol_negative
    r_loss = new.r.values - prev.r.values
    d4 = float(r_loss.min()) >= -tol_negative

    location = None
    if not d1:
        species = min(arrays, key=lambda k: arrays[k].min())
        k, l = np.unravel_index(np.argmin(arrays[species]), arrays[species].shape)
        location = (species, int(k) + 1, int(l) + 1)
    elif not d3:
        k, l = np.unravel_index(np.argmax(s_growth), s_growth.shape)
        location = ("s", int(k) + 1, int(l) + 1)
    elif not d4:
        k, l = np.unravel_index(np.argmin(r_loss), r_loss.shape)
        location = ("r", int(k) + 1, int(l) + 1)
    elif not d2:
        k, l = np.unravel_index(np.argmax(drift_field), drift_field.shape)
        location = ("total", int(k) + 1, int(l) + 1)

    return PropertyReport(
        step_index=step_index,
        d1=bool(d1),
        d2=bool(d2),
        d3=bool(d3),
        d4=bool(d4),
        worst_negative=worst_negative,
        conservation_drift=conservation_drift,
        location=location,
    )


def write_report_csv(path, reports):
    """Write per-step audit reports as CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_CSV_HEADER + "\n")
        for report in reports:
            fh.write(report.csv_row() + "\n")
