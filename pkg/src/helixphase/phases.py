"""Dynamical and geometric phases read off a numerically integrated loop.

Nothing here uses the closed-form state.  The initial substate is prepared
along the spin cone, the spinor is integrated across the helix, and

* the total phase is followed continuously along the trajectory,
* the dynamical phase is ``-integral <psi|H0|psi> dt`` (trapezoid rule on the
  integrator grid),
* the geometric phase is what is left over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .analytic import TWO_PI, PhaseDecomposition, Substate, eigenbasis_along_S, wrap_to_pi
from .dynamics import DEFAULT_STEPS_PER_TURN, evolve
from .errors import AmbiguousUnwrapError, NotCyclicError
from .field import HelicalFieldParams, helical_field, rotating_frame_params

CYCLIC_OVERLAP_MIN = 0.999999
_TIE_ATOL = 1e-9
# below this the tracked amplitude's argument is too noisy to follow
_PIVOT_MIN = 1e-3


@dataclass(frozen=True)
class PhaseTrace:
    """Phase bookkeeping along one trajectory.

    ``wrapped_total[k]`` is the argument of the tracked amplitude relative to
    its initial value, in ``(-pi, pi]``; ``overlap`` is ``<psi0|psi(T)>``.
    ``loop_solid_angle`` is the area swept by the Bloch vector about ``+z``
    (``None`` when the path touches ``-z``, where that area is undefined).
    """

    times: np.ndarray
    dynamical_integrand: np.ndarray
    wrapped_total: np.ndarray
    overlap: complex
    loop_solid_angle: float | None = None

    def __post_init__(self):
        n = len(self.times)
        if len(self.dynamical_integrand) != n or len(self.wrapped_total) != n:
            raise ValueError("trace arrays must have equal length")
        if n < 2 or np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")


def unwrap_phase(wrapped) -> np.ndarray:
    """Continuous branch of a sequence of wrapped angles.

    Each successive difference is mapped into ``(-pi, pi]`` and accumulated
    onto the first element, which is kept as is.

    Raises
    ------
    AmbiguousUnwrapError
        If a difference lies on the ``+-pi`` tie, where both branches are
        equally plausible.
    """
    wrapped = np.asarray(wrapped, dtype=float)
    if wrapped.size < 2:
        return wrapped.copy()
    step = np.abs(wrap_to_pi(np.diff(wrapped)))
    ties = np.flatnonzero(np.abs(step - np.pi) <= _TIE_ATOL)
    if ties.size:
        i = int(ties[0]) + 1
        raise AmbiguousUnwrapError(f"phase difference at index {i} is a +-pi tie", index=i)
    return np.unwrap(wrapped)


def loop_solid_angle(bloch) -> float | None:
    """Signed solid angle swept about ``+z`` by a closed path of unit vectors.

    ``bloch`` has shape ``(3, n)``.  The path is cut into spherical triangles
    with the north pole, each measured with the Van Oosterom-Strackee formula.
    Counter-clockwise circuits seen from ``+z`` count positive; a path that
    winds twice counts twice.  Returns ``None`` if the path comes within
    ``1e-6`` (in ``1 + z``) of the south pole.
    """
    x, y, z = np.asarray(bloch, dtype=float)
    if np.min(1.0 + z) < 1e-6:
        return None
    x0, y0, z0, x1, y1, z1 = x[:-1], y[:-1], z[:-1], x[1:], y[1:], z[1:]
    num = x0 * y1 - y0 * x1
    den = 1.0 + z0 + z1 + (x0 * x1 + y0 * y1 + z0 * z1)
    return float(2.0 * np.sum(np.arctan2(num, den)))


def initial_substate(params: HelicalFieldParams, substate: Substate) -> np.ndarray:
    frame = rotating_frame_params(params)
    s1, s2 = eigenbasis_along_S(frame.theta, params.omega, 0.0)
    return (s1 if substate is Substate.UP_ALONG_S else s2).to_array()


def phase_trace(
    params: HelicalFieldParams,
    substate: Substate,
    steps_per_turn: int = DEFAULT_STEPS_PER_TURN,
    *,
    tol: float | None = None,
) -> PhaseTrace:
    psi0 = initial_substate(params, substate)
    result = evolve(params, psi0, steps_per_turn, tol=tol, record=True)
    t, psi = result.times, result.states

    a, b = psi[:, 0], psi[:, 1]
    ab = np.conj(a) * b
    spin = np.stack([2 * ab.real, 2 * ab.imag, np.abs(a) ** 2 - np.abs(b) ** 2])
    # -<H0> = (kappa/2) B0(t) . <sigma>
    integrand = 0.5 * params.kappa * np.einsum("it,it->t", helical_field(params, t), spin)

    # follow the larger component of psi0; a global phase shows up there unchanged
    pivot = int(np.argmax(np.abs(psi0)))
    tracked = psi[:, pivot]
    if np.min(np.abs(tracked)) < _PIVOT_MIN:
        raise AmbiguousUnwrapError("tracked amplitude passes through zero", index=int(np.argmin(np.abs(tracked))))
    wrapped = np.angle(tracked * np.conj(psi0[pivot]))

    return PhaseTrace(
        times=t,
        dynamical_integrand=integrand,
        wrapped_total=wrapped,
        overlap=complex(np.vdot(psi0, psi[-1])),
        loop_solid_angle=loop_solid_angle(spin),
    )


def decompose(trace: PhaseTrace, substate: Substate) -> PhaseDecomposition:
    """Split the phase of a closed loop into dynamical and geometric parts.

    Raises
    ------
    NotCyclicError
        If the final state has left the ray of the initial one.
    """
    mag = abs(trace.overlap)
    if mag < CYCLIC_OVERLAP_MIN:
        raise NotCyclicError(f"|<psi0|psi(T)>| = {mag:.9f} < {CYCLIC_OVERLAP_MIN}", overlap=mag)
    total = float(unwrap_phase(trace.wrapped_total)[-1])
    dynamical = float(trapezoid(trace.dynamical_integrand, trace.times))
    return PhaseDecomposition(
        total=total, dynamical=dynamical, geometric=total - dynamical, substate=substate,
    )


def extract_phases(
    params: HelicalFieldParams,
    substate: Substate = Substate.UP_ALONG_S,
    steps_per_turn: int = DEFAULT_STEPS_PER_TURN,
    *,
    tol: float | None = None,
) -> PhaseDecomposition:
    """Integrate ``|s_n(0)>`` across the helix and decompose its phase.

    For ``UP_ALONG_S`` the geometric part should equal
    ``-pi*turns*(1 - cos theta)`` modulo ``2*pi``, and the opposite for
    ``DOWN_ALONG_S``.
    """
    return decompose(phase_trace(params, substate, steps_per_turn, tol=tol), substate)


@dataclass(frozen=True)
class TopologicalMeasurement:
    """Both substate decompositions and the full phase ``geometric(up) - geometric(down)``.

    ``raw`` is that difference on whatever branch it landed; ``anchored`` is
    the same angle moved onto the branch nearest minus the solid angle swept
    by the spin-up Bloch vector (``None`` when that solid angle is undefined).
    """

    up: PhaseDecomposition
    down: PhaseDecomposition
    raw: float
    anchored: float | None


def measure_topological_phase(
    params: HelicalFieldParams,
    steps_per_turn: int = DEFAULT_STEPS_PER_TURN,
    *,
    tol: float | None = None,
) -> TopologicalMeasurement:
    up_trace = phase_trace(params, Substate.UP_ALONG_S, steps_per_turn, tol=tol)
    up = decompose(up_trace, Substate.UP_ALONG_S)
    down = extract_phases(params, Substate.DOWN_ALONG_S, steps_per_turn, tol=tol)
    raw = up.geometric - down.geometric
    anchored = None
    if up_trace.loop_solid_angle is not None:
        target = -up_trace.loop_solid_angle
        anchored = raw + TWO_PI * round((target - raw) / TWO_PI)
    return TopologicalMeasurement(up, down, raw, anchored)
