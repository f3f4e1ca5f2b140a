"""Closed-form solution for a neutron entering the helix in ``|up>``.

In the eigenbasis of ``S(t) . sigma`` the exact state splits into two branches
whose phases are the dynamical phase ``kappa*B*t`` and the solid angle swept by
the spin axis.  After a whole number of turns the axis closes its cone and the
branches carry ``exp(+-i (eps + gamma)/2)`` with ``eps = kappa*B*T`` and
``gamma = -2*pi*turns*(1 - cos(theta))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Spinor
from .field import HelicalFieldParams, RotatingFrameParams, rotating_frame_params

TWO_PI = 2.0 * math.pi


class Substate(enum.Enum):
    """Spin projection along the instantaneous axis ``S(t)``."""

    UP_ALONG_S = 0.5
    DOWN_ALONG_S = -0.5

    @property
    def s(self) -> float:
        return self.value


def wrap_to_pi(x):
    """Map angles into ``(-pi, pi]``."""
    y = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), TWO_PI)
    return float(y) if np.ndim(y) == 0 else y


@dataclass(frozen=True)
class PhaseDecomposition:
    """Total, dynamical and geometric phase of one substate over a closed loop.

    ``geometric`` is ``total - dynamical`` on whatever branch the unwrapped
    total landed on; ``geometric_wrapped`` is the same angle mapped into
    ``(-2*pi, 0]``.  All values are per substate, i.e. already multiplied by
    ``s = +-1/2``.
    """

    total: float
    dynamical: float
    geometric: float
    substate: Substate

    def __post_init__(self):
        if abs(wrap_to_pi(self.total - self.dynamical - self.geometric)) > 1e-9:
            raise ValueError("total must equal dynamical + geometric modulo 2*pi")

    @property
    def geometric_wrapped(self) -> float:
        g = -np.mod(-self.geometric, TWO_PI)
        return float(g)


def solid_angle(cone_angle) -> float:
    """Solid angle enclosed by one circuit of a cone of half-angle ``cone_angle``."""
    return TWO_PI * (1.0 - np.cos(cone_angle))


def eigenbasis_along_S(theta: float, omega: float, t) -> tuple[Spinor, Spinor]:
    """Eigenvectors of ``S(t) . sigma`` for eigenvalues +1 and -1.

    The gauge is single valued around the loop::

        |s1(t)> = (cos(theta/2),  exp(i w t) sin(theta/2))
        |s2(t)> = (-sin(theta/2), exp(i w t) cos(theta/2))
    """
    ch, sh = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(omega * t), math.sin(omega * t))
    return Spinor(ch, e * sh), Spinor(-sh, e * ch)


def exact_states(params: HelicalFieldParams, times) -> np.ndarray:
    """Exact state for ``psi(0) = |up>`` at each of ``times``; shape ``(n, 2)``.

    With ``chi(t) = (kappa*B*t - omega*t*(1 - cos theta)) / 2``::

        psi(t) = cos(theta/2) e^{+i chi} |s1(t)> - sin(theta/2) e^{-i chi - i omega t} |s2(t)>

    The extra ``e^{-i omega t}`` on the second branch and the minus sign are
    artefacts of the gauge of :func:`eigenbasis_along_S`; both are trivial at
    the end of every full turn.
    """
    frame = rotating_frame_params(params)
    t = np.atleast_1d(np.asarray(times, dtype=float))
    w = params.omega
    ch, sh = math.cos(frame.theta / 2), math.sin(frame.theta / 2)
    chi = 0.5 * (params.kappa * frame.B * t - w * t * (1.0 - math.cos(frame.theta)))
    e_w = np.exp(1j * w * t)
    branch1 = ch * np.exp(1j * chi)
    branch2 = -sh * np.exp(-1j * (chi + w * t))
    up = branch1 * ch + branch2 * (-sh)
    down = branch1 * e_w * sh + branch2 * e_w * ch
    return np.stack([up, down], axis=-1)


def exact_state(params: HelicalFieldParams, t: float) -> Spinor:
    """Single-time version of :func:`exact_states`."""
    return Spinor.from_array(exact_states(params, t)[0])


def polarization_exact(params: HelicalFieldParams) -> float:
    """``P_z = 1 - 2 sin^2(theta) sin^2((kappa B T - 2 pi turns (1 - cos theta))/2)``."""
    frame = rotating_frame_params(params)
    arg = 0.5 * (dynamical_phase(frame, params.T, params.kappa)
                 + topological_phase(frame.theta, params.turns))
    return 1.0 - 2.0 * math.sin(frame.theta) ** 2 * math.sin(arg) ** 2


def polarization_adiabatic(params: HelicalFieldParams) -> float:
    """Adiabatic form of the polarization, with ``B -> B0`` and ``theta -> phi``."""
    phi = params.phi
    arg = 0.5 * (params.kappa * params.B0 * params.T + berry_phase(phi, params.turns))
    return 1.0 - 2.0 * math.sin(phi) ** 2 * math.sin(arg) ** 2


def topological_phase(theta: float, turns: int = 1) -> float:
    """``gamma = -turns * 2*pi*(1 - cos theta)``, the full (both-substate) phase."""
    return -turns * TWO_PI * (1.0 - math.cos(theta))


def berry_phase(phi: float, turns: int = 1) -> float:
    """Adiabatic limit of :func:`topological_phase`: the field cone angle replaces ``theta``."""
    return topological_phase(phi, turns)


def dynamical_phase(frame: RotatingFrameParams, T: float, kappa: float) -> float:
    """``eps = kappa * B * T``; ``B`` is constant along the helix."""
    if T <= 0:
        raise ValueError("T must be positive")
    return kappa * frame.B * T


def analytic_phases(params: HelicalFieldParams, substate: Substate) -> PhaseDecomposition:
    """Phases acquired by ``|s_n(0)>`` over the full helix, on the natural branch."""
    frame = rotating_frame_params(params)
    s = substate.s
    eps = dynamical_phase(frame, params.T, params.kappa)
    gamma = topological_phase(frame.theta, params.turns)
    return PhaseDecomposition(
        total=s * (eps + gamma), dynamical=s * eps, geometric=s * gamma, substate=substate,
    )
