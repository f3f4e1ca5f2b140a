"""Unitary time stepping of the neutron spinor in the helical field.

The Hamiltonian is ``H0(t) = -kappa * B0(t) . sigma / 2`` (hbar = 1).  Each step
applies the exact exponential of ``H0`` sampled at the step midpoint, which is
second order and unitary by construction.  :func:`evolve` runs the stepper at
two resolutions, uses the difference as an error estimate, and returns the
Richardson-extrapolated state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import NonConvergedError
from .field import HelicalFieldParams, helical_field

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

DEFAULT_STEPS_PER_TURN = 4096
MAX_TOTAL_STEPS = 2**20
MIN_STEPS_PER_TURN = 16

_NORM_TOL = 1e-10


@dataclass(frozen=True)
class Spinor:
    """Normalized spin-1/2 state on the ``z`` basis."""

    up: complex
    down: complex

    def __post_init__(self):
        object.__setattr__(self, "up", complex(self.up))
        object.__setattr__(self, "down", complex(self.down))
        norm2 = abs(self.up) ** 2 + abs(self.down) ** 2
        if not abs(norm2 - 1.0) <= _NORM_TOL:
            raise ValueError(f"spinor is not normalized: |psi|^2 = {norm2!r}")

    @classmethod
    def from_array(cls, psi, normalize: bool = False) -> Spinor:
        psi = np.asarray(psi, dtype=complex)
        if normalize:
            psi = psi / np.linalg.norm(psi)
        return cls(psi[0], psi[1])

    def to_array(self) -> np.ndarray:
        return np.array([self.up, self.down], dtype=complex)

    def __array__(self, dtype=None, copy=None):
        arr = self.to_array()
        return arr if dtype is None else arr.astype(dtype)


SPIN_UP = Spinor(1.0, 0.0)
SPIN_DOWN = Spinor(0.0, 1.0)


@dataclass(frozen=True)
class EvolutionResult:
    """Outcome of :func:`evolve`.

    ``final_state`` is the Richardson-extrapolated state, renormalized.
    ``norm_drift`` is measured on the raw fine-resolution run, before
    extrapolation, so it reflects the stepper itself.  ``richardson_error``
    is the max-amplitude error estimate of the fine run; the extrapolated state
    is typically far more accurate than this.  ``times``/``states`` hold the
    extrapolated trajectory on the coarse grid when recording was requested.
    """

    final_state: Spinor
    polarization_z: float
    steps: int
    norm_drift: float
    richardson_error: float
    times: np.ndarray | None = None
    states: np.ndarray | None = None


def hamiltonian_matrix(field, kappa: float) -> np.ndarray:
    """``-kappa * (Bx sx + By sy + Bz sz) / 2`` for a single field vector."""
    bx, by, bz = (float(b) for b in field)
    return -0.5 * kappa * (bx * SIGMA_X + by * SIGMA_Y + bz * SIGMA_Z)


def step_propagator(H, dt: float) -> np.ndarray:
    """Closed-form ``exp(-i H dt)`` for a constant Hermitian 2x2 ``H``."""
    H = np.asarray(H, dtype=complex)
    h0 = 0.5 * (H[0, 0] + H[1, 1]).real
    hx = H[1, 0].real
    hy = H[1, 0].imag
    hz = 0.5 * (H[0, 0] - H[1, 1]).real
    n = math.sqrt(hx * hx + hy * hy + hz * hz)
    c = math.cos(n * dt)
    # sin(n dt)/n, finite as n -> 0
    s = math.sin(n * dt) / n if n > 0 else dt
    U = c * np.eye(2, dtype=complex) - 1j * s * (hx * SIGMA_X + hy * SIGMA_Y + hz * SIGMA_Z)
    if h0:
        U *= complex(math.cos(h0 * dt), -math.sin(h0 * dt))
    return U


def polarization_z(psi) -> float:
    """``|up|^2 - |down|^2``."""
    up, down = np.asarray(psi, dtype=complex)
    return float(abs(up) ** 2 - abs(down) ** 2)


@numba.njit(cache=True, nogil=True)
def _apply_steps(h, dt, psi, stride, trace):
    # h[k] holds the Pauli coefficients of step k; trace[j] gets the state after j*stride steps
    a = psi[0]
    b = psi[1]
    if stride > 0:
        trace[0, 0] = a
        trace[0, 1] = b
    for k in range(h.shape[0]):
        x = h[k, 0]
        y = h[k, 1]
        z = h[k, 2]
        n = math.sqrt(x * x + y * y + z * z)
        c = math.cos(n * dt)
        s = math.sin(n * dt) / n if n > 0.0 else dt
        u00 = complex(c, -s * z)
        u11 = complex(c, s * z)
        u01 = complex(-s * y, -s * x)
        u10 = complex(s * y, -s * x)
        a, b = u00 * a + u01 * b, u10 * a + u11 * b
        if stride > 0 and (k + 1) % stride == 0:
            j = (k + 1) // stride
            trace[j, 0] = a
            trace[j, 1] = b
    out = np.empty(2, dtype=np.complex128)
    out[0] = a
    out[1] = b
    return out


def midpoint_coefficients(params: HelicalFieldParams, n_steps: int) -> tuple[np.ndarray, float]:
    """Pauli coefficients ``h`` (``H = h . sigma``) at the midpoints of a uniform grid on ``[0, T]``."""
    dt = params.T / n_steps
    t_mid = (np.arange(n_steps) + 0.5) * dt
    h = (-0.5 * params.kappa) * helical_field(params, t_mid).T
    return np.ascontiguousarray(h), dt


def apply_steps(h: np.ndarray, dt: float, psi0, stride: int = 0):
    """Apply the exponential steps encoded by ``h`` to ``psi0``.

    Returns the final state, and with ``stride > 0`` also the states after
    every ``stride`` steps (including the initial one).  A negative ``dt``
    with ``h`` reversed applies the adjoint sequence.
    """
    psi = np.ascontiguousarray(np.asarray(psi0, dtype=np.complex128))
    n_steps = h.shape[0]
    if stride > 0:
        if n_steps % stride:
            raise ValueError("stride must divide the number of steps")
        trace = np.empty((n_steps // stride + 1, 2), dtype=np.complex128)
    else:
        trace = np.empty((1, 2), dtype=np.complex128)
    final = _apply_steps(np.ascontiguousarray(h, dtype=np.float64), float(dt), psi, stride, trace)
    return (final, trace) if stride > 0 else final


def propagate(params: HelicalFieldParams, psi0, n_steps: int, stride: int = 0):
    """Raw exponential-midpoint solution on ``n_steps`` uniform steps (no extrapolation)."""
    h, dt = midpoint_coefficients(params, n_steps)
    return apply_steps(h, dt, psi0, stride)


def evolve(
    params: HelicalFieldParams,
    psi0=SPIN_UP,
    steps_per_turn: int = DEFAULT_STEPS_PER_TURN,
    *,
    tol: float | None = None,
    max_steps: int = MAX_TOTAL_STEPS,
    record: bool = False,
) -> EvolutionResult:
    """Integrate the spinor across the full helix.

    The stepper runs with ``steps_per_turn`` and twice as many steps per turn.
    Their difference over three estimates the error of the finer run, and
    ``(4*fine - coarse)/3`` cancels the leading second-order term.  When
    ``tol`` is given the resolution is doubled until the estimate falls below
    it.

    Parameters
    ----------
    params : HelicalFieldParams
    psi0 : Spinor or array_like
        Initial state, ``|up>`` by default.
    steps_per_turn : int
        Coarse steps per field turn; at least 16.
    tol : float, optional
        Target for ``richardson_error``.
    max_steps : int
        Cap on the total steps of the fine run.
    record : bool
        Keep the extrapolated trajectory on the coarse grid.

    Raises
    ------
    NonConvergedError
        If ``tol`` is not met before the fine run would exceed ``max_steps``.
    """
    if steps_per_turn < MIN_STEPS_PER_TURN:
        raise ValueError(f"steps_per_turn must be >= {MIN_STEPS_PER_TURN}")
    psi0 = np.asarray(psi0, dtype=complex)
    stride = 1 if record else 0
    n = params.turns * steps_per_turn
    if 2 * n > max_steps:
        raise ValueError(f"{2 * n} fine steps exceed max_steps={max_steps}")

    final = (lambda run: run[0]) if record else (lambda run: run)
    coarse = propagate(params, psi0, n, stride)
    while True:
        fine = propagate(params, psi0, 2 * n, 2 * stride)
        psi_c, psi_f = final(coarse), final(fine)
        err = float(np.max(np.abs(psi_f - psi_c))) / 3.0
        if tol is None or err <= tol:
            break
        if 4 * n > max_steps:
            raise NonConvergedError(
                f"Richardson error {err:.3e} above tolerance {tol:.3e} at {2 * n} steps",
                error=err, steps=2 * n,
            )
        n *= 2
        # the old fine run is the new coarse one unless a full-resolution trace is needed
        coarse = propagate(params, psi0, n, stride) if record else fine

    extrapolated = (4.0 * psi_f - psi_c) / 3.0
    extrapolated /= np.linalg.norm(extrapolated)
    times = states = None
    if record:
        states = (4.0 * fine[1] - coarse[1]) / 3.0
        states /= np.linalg.norm(states, axis=1, keepdims=True)
        states[-1] = extrapolated
        times = np.linspace(0.0, params.T, n + 1)

    return EvolutionResult(
        final_state=Spinor.from_array(extrapolated),
        polarization_z=polarization_z(extrapolated),
        steps=2 * n,
        norm_drift=abs(float(np.linalg.norm(psi_f)) - 1.0),
        richardson_error=err,
        times=times,
        states=states,
    )
