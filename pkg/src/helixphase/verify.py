"""Self-checks comparing independent routes through the physics.

Each check returns a :class:`Check` with the measured figure of merit and the
tolerance it must stay under.  ``quick=True`` shrinks the grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import Substate, exact_states, polarization_exact, topological_phase, wrap_to_pi
from .dynamics import SPIN_UP, evolve, propagate, step_propagator
from .field import (
    HelicalFieldParams,
    RotatingFrameParams,
    helical_field,
    helical_params_from_frame,
    reconstruct_field,
    rotating_frame_params,
)
from .phases import extract_phases


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<28} {self.value:12.3e} < {self.tolerance:9.1e}  {status}"


def _below(name, value, tol):
    return Check(name, float(value), tol, bool(value < tol))


def random_params(rng: np.random.Generator, n: int, turns: int = 1) -> list[HelicalFieldParams]:
    """Unit-``B0`` helices with log-uniform ``r`` in [0.01, 10] and uniform ``phi``."""
    r = 10.0 ** rng.uniform(-2, 1, n)
    phi = rng.uniform(0.0, math.pi, n)
    return [HelicalFieldParams.from_ratio(ri, pi, turns=turns) for ri, pi in zip(r, phi)]


def decomposition_identity(n: int = 1000, perturb: float = 0.0, seed: int = 0) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in random_params(rng, n):
        t = rng.uniform(0.0, p.T)
        try:
            frame = rotating_frame_params(p)
        except ValueError:
            continue
        rebuilt = reconstruct_field(frame, p.kappa, p.omega, t) + perturb * p.B0
        worst = max(worst, float(np.max(np.abs(rebuilt - helical_field(p, t)))) / p.B0)
    return _below("decomposition_identity", worst, 1e-12)


def unitarity(n: int = 2000, seed: int = 1) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        h = rng.normal(size=3) * 10 ** rng.uniform(-3, 3)
        H = h[0] * np.array([[0, 1], [1, 0]]) + h[1] * np.array([[0, -1j], [1j, 0]]) + h[2] * np.diag([1, -1])
        U = step_propagator(H, rng.uniform(1e-4, 1.0))
        worst = max(worst, float(np.max(np.abs(U.conj().T @ U - np.eye(2)))))
    return _below("unitarity_per_step", worst, 1e-12)


def norm_drift(n_steps: int = 10**6) -> Check:
    p = HelicalFieldParams.from_ratio(0.3, 1.0, turns=4)
    psi = propagate(p, SPIN_UP, n_steps)
    return _below("norm_drift", abs(np.linalg.norm(psi) - 1.0), 1e-10)


def convergence_order() -> Check:
    """Worst deviation of the observed order from 2 over three step halvings."""
    p = HelicalFieldParams.from_ratio(0.5, math.radians(60))
    exact = exact_states(p, p.T)[0]
    errs = [float(np.max(np.abs(propagate(p, SPIN_UP, n) - exact))) for n in (128, 256, 512, 1024)]
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    return _below("convergence_order_dev", max(abs(o - 2.0) for o in orders), 0.3)


def _grid(quick: bool):
    phis = [math.radians(d) for d in (range(10, 180, 40) if quick else range(10, 180, 10))]
    rs = (0.1, 1.0) if quick else (0.01, 0.1, 0.5, 1.0, 2.0)
    for turns in (1, 2):
        for r in rs:
            for phi in phis:
                yield HelicalFieldParams.from_ratio(r, phi, turns=turns)


def analytic_vs_numeric(quick: bool = False, steps_per_turn: int = 8192) -> tuple[Check, Check]:
    worst_pz = worst_state = 0.0
    for p in _grid(quick):
        res = evolve(p, SPIN_UP, steps_per_turn, record=True)
        worst_pz = max(worst_pz, abs(res.polarization_z - polarization_exact(p)))
        n = len(res.times) - 1
        idx = np.arange(1, 64, 2) * n // 64
        diff = np.abs(exact_states(p, res.times[idx]) - res.states[idx])
        worst_state = max(worst_state, float(diff.max()))
    return _below("polarization_exact_vs_num", worst_pz, 1e-8), _below("interior_state", worst_state, 1e-8)


def geometric_phase(quick: bool = False, steps_per_turn: int = 8192) -> Check:
    worst = 0.0
    for p in _grid(quick):
        theta = rotating_frame_params(p).theta
        g = extract_phases(p, Substate.UP_ALONG_S, steps_per_turn).geometric
        worst = max(worst, abs(wrap_to_pi(g - topological_phase(theta, p.turns) / 2)))
    return _below("geometric_phase", worst, 1e-5)


def field_scaling(steps_per_turn: int = 8192) -> Check:
    """Doubling ``B`` at fixed cone angle: geometric fixed, dynamical doubled."""
    worst = 0.0
    for theta in (0.4, 1.1, 2.0):
        base = RotatingFrameParams(B=1.0, theta=theta)
        scaled = RotatingFrameParams(B=2.0, theta=theta)
        a = extract_phases(helical_params_from_frame(base, L=1.0, v=0.3, kappa=1.0), steps_per_turn=steps_per_turn)
        b = extract_phases(helical_params_from_frame(scaled, L=1.0, v=0.3, kappa=1.0), steps_per_turn=steps_per_turn)
        worst = max(worst, abs(wrap_to_pi(a.geometric - b.geometric)),
                    abs(b.dynamical / (2 * a.dynamical) - 1.0))
    return _below("field_scaling", worst, 1e-6)


def adiabatic_limit() -> Check:
    """|theta - phi| at r = 1e-3 relative to its 2e-3 budget, and the 10x scaling ratio."""
    phis = np.radians(np.arange(10, 180, 10))

    def dev(r):
        return max(abs(rotating_frame_params(HelicalFieldParams.from_ratio(r, phi)).theta - phi) for phi in phis)

    d3, d4 = dev(1e-3), dev(1e-4)
    ratio_ok = 8.0 <= d3 / d4 <= 12.0
    value = d3 if ratio_ok else math.inf
    return _below("adiabatic_limit", value, 2e-3)


def run_all(quick: bool = False, perturb_field: float = 0.0) -> list[Check]:
    steps = 4096 if quick else 8192
    pz, interior = analytic_vs_numeric(quick, steps)
    return [
        decomposition_identity(200 if quick else 1000, perturb=perturb_field),
        unitarity(500 if quick else 2000),
        norm_drift(10**5 if quick else 10**6),
        convergence_order(),
        pz,
        interior,
        geometric_phase(quick, steps),
        field_scaling(steps),
        adiabatic_limit(),
    ]
