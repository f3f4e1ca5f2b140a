"""Topological phase versus solid angle, polarization scans, and data overlay.

The sweep scans the field cone angle ``phi`` at fixed ``B0, L, v, kappa`` and
tabulates, per row, the Berry phase of the field cone, the nonadiabatic phase
of the spin cone, and optionally the phase measured from integrated
trajectories.  Experimental points from a CSV file can be compared against
both curves.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analytic import (
    berry_phase,
    polarization_adiabatic,
    polarization_exact,
    solid_angle,
    topological_phase,
    wrap_to_pi,
)
from .dynamics import DEFAULT_STEPS_PER_TURN, evolve
from .errors import AmbiguousUnwrapError, DegenerateConfigurationError, DomainError, HelixPhaseError, ParseError, UnitError
from .field import HelicalFieldParams, adiabaticity_ratio, rotating_frame_params
from .phases import TopologicalMeasurement, measure_topological_phase, unwrap_phase

FLAG_B_NONPOSITIVE = "B_nonpositive"
FLAG_BRANCH_AMBIGUOUS = "branch_ambiguous"
FLAG_DEGENERATE = "degenerate"
FLAG_NUMERIC_FAILED = "numeric_failed"

SWEEP_HEADER = (
    "phi_rad", "omega_field_sr", "theta_rad", "omega_spin_sr", "gamma_berry_rad",
    "gamma_nonadiabatic_rad", "gamma_numeric_rad", "adiabaticity_r", "flags",
)
DEFAULT_PHI_POINTS = 181


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x + 0.0:.17g}"  # + 0.0 folds -0.0 into 0.0


@dataclass(frozen=True)
class SweepConfig:
    base: HelicalFieldParams
    phi_grid: tuple[float, ...] = tuple(np.linspace(0.0, math.pi, DEFAULT_PHI_POINTS))
    steps_per_turn: int = DEFAULT_STEPS_PER_TURN
    numeric_points: bool = True
    tol: float | None = None

    def __post_init__(self):
        grid = tuple(float(p) for p in self.phi_grid)
        object.__setattr__(self, "phi_grid", grid)
        if not grid:
            raise ValueError("phi_grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("phi_grid must be strictly increasing")
        if grid[0] < 0.0 or grid[-1] > math.pi:
            raise ValueError("phi_grid must lie within [0, pi]")


@dataclass(frozen=True)
class SweepRow:
    phi: float
    solid_angle_field: float
    theta: float
    solid_angle_spin: float
    gamma_berry: float
    gamma_nonadiabatic: float
    gamma_numeric: float | None
    adiabaticity_r: float
    flags: frozenset[str] = field(default_factory=frozenset)

    def csv_fields(self) -> list[str]:
        return [
            _fmt(self.phi), _fmt(self.solid_angle_field), _fmt(self.theta),
            _fmt(self.solid_angle_spin), _fmt(self.gamma_berry),
            _fmt(self.gamma_nonadiabatic), _fmt(self.gamma_numeric),
            _fmt(self.adiabaticity_r), "|".join(sorted(self.flags)),
        ]


@dataclass(frozen=True)
class ExperimentalPoint:
    solid_angle: float
    gamma: float
    gamma_uncertainty: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.solid_angle <= 4 * math.pi:
            raise ValueError(f"solid angle {self.solid_angle!r} outside [0, 4*pi]")


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _row(config: SweepConfig, phi: float) -> tuple[SweepRow, TopologicalMeasurement | None]:
    params = replace(config.base, phi=phi)
    turns = params.turns
    omega_b = solid_angle(phi)
    r = adiabaticity_ratio(params)
    flags = set()
    try:
        frame = rotating_frame_params(params)
    except DegenerateConfigurationError:
        nan = math.nan
        row = SweepRow(phi, omega_b, nan, nan, berry_phase(phi, turns), nan, None, r,
                       frozenset({FLAG_DEGENERATE}))
        return row, None
    if frame.B <= 0:
        flags.add(FLAG_B_NONPOSITIVE)

    measured = None
    if config.numeric_points:
        try:
            measured = measure_topological_phase(params, config.steps_per_turn, tol=config.tol)
        except HelixPhaseError:
            flags.add(FLAG_NUMERIC_FAILED)

    row = SweepRow(
        phi=phi,
        solid_angle_field=omega_b,
        theta=frame.theta,
        solid_angle_spin=solid_angle(frame.theta),
        gamma_berry=berry_phase(phi, turns),
        gamma_nonadiabatic=topological_phase(frame.theta, turns),
        gamma_numeric=None,
        adiabaticity_r=r,
        flags=frozenset(flags),
    )
    return row, measured


def _resolve_branches(rows: list[SweepRow], measured: list) -> list[SweepRow]:
    """Put the numerically measured phases on one continuous branch along the grid.

    The first measured row takes the branch given by its own Bloch-loop solid
    angle (or, failing that, the one nearest its Berry phase); later rows
    follow by continuity.  A row is flagged when its own solid-angle branch
    disagrees with continuity, or when it sits more than pi/2 from its
    neighbour.
    """
    idx = [i for i, m in enumerate(measured) if m is not None]
    if not idx:
        return rows
    raw = np.array([measured[i].raw for i in idx])
    anchored = [measured[i].anchored for i in idx]
    try:
        cont = unwrap_phase(raw)
        tie = None
    except AmbiguousUnwrapError as exc:
        cont = np.unwrap(raw)
        tie = idx[exc.index]
    first = anchored[0] if anchored[0] is not None else rows[idx[0]].gamma_berry
    cont = cont + 2 * math.pi * round((first - cont[0]) / (2 * math.pi))

    out = list(rows)
    jumps = np.abs(wrap_to_pi(np.diff(raw))) > math.pi / 2
    for j, i in enumerate(idx):
        flags = set(rows[i].flags)
        off_branch = anchored[j] is not None and abs(anchored[j] - cont[j]) > math.pi
        if off_branch or (j > 0 and jumps[j - 1]) or i == tie:
            flags.add(FLAG_BRANCH_AMBIGUOUS)
        out[i] = replace(rows[i], gamma_numeric=float(cont[j]), flags=frozenset(flags))
    return out


def sweep_topological_phase(config: SweepConfig, *, jobs: int | None = None) -> list[SweepRow]:
    """One :class:`SweepRow` per ``phi`` in grid order.

    ``gamma_numeric`` is ``geometric(up) - geometric(down)`` from two
    integrated loops, i.e. the full phase comparable to
    ``gamma_nonadiabatic``.  Rows whose integration fails are flagged and
    left without a numeric value; the sweep carries on.
    """
    results = _map(lambda phi: _row(config, phi), config.phi_grid, jobs)
    rows = [row for row, _ in results]
    return _resolve_branches(rows, [m for _, m in results])


def format_sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())
    return buf.getvalue()


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    Path(path).write_text(format_sweep_csv(rows))


class Scan(enum.Enum):
    VARY_B0 = "vary_B0"
    VARY_PHI = "vary_phi"
    VARY_V = "vary_v"


_SCAN_COLUMN = {Scan.VARY_B0: ("B0", "B0_T"), Scan.VARY_PHI: ("phi", "phi_rad"), Scan.VARY_V: ("v", "v_m_per_s")}


@dataclass(frozen=True)
class PolarizationRow:
    parameter: float
    pz_exact: float
    pz_adiabatic: float
    pz_numeric: float | None = None


def sweep_polarization(
    config: SweepConfig, scan: Scan | str, values=None, *, jobs: int | None = None,
) -> list[PolarizationRow]:
    """Exact, adiabatic and (optionally) integrated ``P_z`` along a 1-D scan.

    ``values`` defaults to ``config.phi_grid`` for a phi scan and is required
    otherwise.
    """
    scan = Scan(scan)
    attr, _ = _SCAN_COLUMN[scan]
    if values is None:
        if scan is not Scan.VARY_PHI:
            raise ValueError(f"{scan.value} needs explicit values")
        values = config.phi_grid
    values = [float(x) for x in values]
    if not values:
        raise ValueError("empty scan")

    def point(x):
        params = replace(config.base, **{attr: x})
        try:
            exact = polarization_exact(params)
        except DegenerateConfigurationError:
            exact = math.nan
        numeric = None
        if config.numeric_points:
            try:
                numeric = evolve(params, steps_per_turn=config.steps_per_turn, tol=config.tol).polarization_z
            except HelixPhaseError:
                numeric = None
        return PolarizationRow(x, exact, polarization_adiabatic(params), numeric)

    return _map(point, values, jobs)


def format_polarization_csv(rows: list[PolarizationRow], scan: Scan | str) -> str:
    _, column = _SCAN_COLUMN[Scan(scan)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([column, "P_z_exact", "P_z_adiabatic", "P_z_numeric"])
    for row in rows:
        writer.writerow([_fmt(row.parameter), _fmt(row.pz_exact), _fmt(row.pz_adiabatic), _fmt(row.pz_numeric)])
    return buf.getvalue()


_UNITS = {
    "solid_angle": {"sr": 1.0},
    "gamma": {"rad": 1.0, "deg": math.pi / 180},
    "gamma_err": {"rad": 1.0, "deg": math.pi / 180},
}


def _parse_header(names: list[str], line: int) -> list[float]:
    expected = ["solid_angle", "gamma", "gamma_err"]
    if len(names) not in (2, 3):
        raise ParseError(f"expected 2 or 3 columns in header, got {len(names)}", line=line)
    factors = []
    for want, name in zip(expected, names):
        quantity, sep, unit = name.rpartition("_")
        if not sep or quantity != want:
            raise ParseError(f"unexpected column {name!r}, wanted {want}_<unit>", line=line)
        if unit not in _UNITS[quantity]:
            raise UnitError(f"unknown unit {unit!r} for {quantity}", line=line)
        factors.append(_UNITS[quantity][unit])
    return factors


def load_experimental_points(path) -> list[ExperimentalPoint]:
    """Read ``solid_angle_sr,gamma_rad[,gamma_err_rad]`` rows.

    Lines starting with ``#`` and blank lines are skipped.  ``gamma`` columns
    may also be declared in ``deg``; values are returned in radians.
    """
    factors = None
    points = []
    with open(path, newline="") as fh:
        for lineno, text in enumerate(fh, start=1):
            stripped = text.strip()
            if not stripped or stripped.startswith("#"):
                continue
            cells = [c.strip() for c in stripped.split(",")]
            if factors is None:
                factors = _parse_header(cells, lineno)
                continue
            if len(cells) != len(factors):
                raise ParseError(f"expected {len(factors)} values, got {len(cells)}", line=lineno)
            try:
                nums = [float(c) * f for c, f in zip(cells, factors)]
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            if not all(math.isfinite(x) for x in nums):
                raise ParseError("non-finite value", line=lineno)
            try:
                points.append(ExperimentalPoint(*nums))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    if factors is None:
        raise ParseError("missing header")
    return points


@dataclass(frozen=True)
class OverlaySummary:
    """Residuals ``gamma_point - scale * gamma_curve`` at each point, per curve."""

    scale: float
    residuals_berry: np.ndarray
    residuals_nonadiabatic: np.ndarray

    @property
    def rms_berry(self) -> float:
        return float(np.sqrt(np.mean(self.residuals_berry**2)))

    @property
    def rms_nonadiabatic(self) -> float:
        return float(np.sqrt(np.mean(self.residuals_nonadiabatic**2)))


def compare_overlay(
    rows: list[SweepRow], points: list[ExperimentalPoint], scale: float | None = None,
) -> list[OverlaySummary]:
    """Compare data with the Berry and nonadiabatic curves.

    Both curves are interpolated linearly in the field solid angle.  With
    ``scale=None`` the comparison is reported for the full phase (1) and the
    per-substate phase (1/2), since the convention of a dataset is not always
    stated.

    Raises
    ------
    DomainError
        If a point lies outside the solid-angle range of the sweep.
    """
    if not rows or not points:
        raise ValueError("compare_overlay needs rows and points")
    usable = [r for r in rows if math.isfinite(r.gamma_nonadiabatic)]
    x = np.array([r.solid_angle_field for r in usable])
    berry = np.array([r.gamma_berry for r in usable])
    nonad = np.array([r.gamma_nonadiabatic for r in usable])
    lo, hi = x.min(), x.max()
    omega = np.array([p.solid_angle for p in points])
    gamma = np.array([p.gamma for p in points])
    outside = (omega < lo) | (omega > hi)
    if outside.any():
        bad = float(omega[outside][0])
        raise DomainError(f"solid angle {bad!r} outside sweep range [{lo!r}, {hi!r}]")

    scales = (1.0, 0.5) if scale is None else (float(scale),)
    return [
        OverlaySummary(
            scale=s,
            residuals_berry=gamma - s * np.interp(omega, x, berry),
            residuals_nonadiabatic=gamma - s * np.interp(omega, x, nonad),
        )
        for s in scales
    ]
