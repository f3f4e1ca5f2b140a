"""Helical magnetic field, cone evolution of the spin axis, and the rotating-frame solution.

A neutron moving with speed ``v`` through a static helix of pitch ``L`` sees the
field rotate about ``z`` at ``omega = 2*pi*v/L``.  Writing that field as

    B0(t) = B * S(t) - (1/kappa) * S(t) x dS/dt

with ``S(t)`` a unit vector precessing on a cone of half-angle ``theta`` splits
the Hamiltonian into a reference part along ``S`` and a transitionless auxiliary
part.  :func:`rotating_frame_params` returns the unique ``(B, theta)`` for a given
helix.

Vectors are plain ``numpy`` arrays with the Cartesian components on the leading
axis, so every function here broadcasts over an array of times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import physical_constants

from .errors import DegenerateConfigurationError

#: Magnitude of the neutron gyromagnetic ratio in rad s^-1 T^-1 (CODATA, via scipy).
NEUTRON_GYROMAGNETIC_RATIO: float = physical_constants["neutron gyromag. ratio"][0]

_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class HelicalFieldParams:
    """Physical configuration of one pass through the helical field.

    Parameters
    ----------
    B0 : float
        Field magnitude in tesla.
    phi : float
        Cone angle of the field about the beam axis, radians in ``[0, pi]``.
    L : float
        Length over which the field makes one full right-handed turn (m).
    v : float
        Neutron velocity along the axis (m/s).
    kappa : float
        Gyromagnetic ratio magnitude (rad s^-1 T^-1).
    turns : int
        Number of full field rotations traversed.
    """

    B0: float
    phi: float
    L: float
    v: float
    kappa: float = NEUTRON_GYROMAGNETIC_RATIO
    turns: int = 1

    def __post_init__(self):
        for name in ("B0", "phi", "L", "v", "kappa"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.B0 <= 0 or self.L <= 0 or self.v <= 0 or self.kappa <= 0:
            raise ValueError("B0, L, v and kappa must be positive")
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError(f"phi must lie in [0, pi], got {self.phi!r}")
        if int(self.turns) != self.turns or self.turns < 1:
            raise ValueError(f"turns must be a positive integer, got {self.turns!r}")
        object.__setattr__(self, "turns", int(self.turns))

    @property
    def omega(self) -> float:
        """Angular frequency of the field seen by the neutron (rad/s)."""
        return 2.0 * math.pi * self.v / self.L

    @property
    def period(self) -> float:
        return self.L / self.v

    @property
    def T(self) -> float:
        """Transit time through all turns (s)."""
        return self.turns * self.L / self.v

    @property
    def c(self) -> float:
        """Rotation rate expressed as a field, ``omega / kappa`` (T)."""
        return self.omega / self.kappa

    @classmethod
    def from_ratio(
        cls, r: float, phi: float, *, B0: float = 1.0, L: float = 1.0,
        kappa: float = 1.0, turns: int = 1,
    ) -> HelicalFieldParams:
        """Build parameters with a prescribed adiabaticity ratio ``r = c / B0``.

        The velocity is solved for; the other quantities are taken as given.
        Handy for dimensionless studies where only ``r`` and ``phi`` matter.
        """
        v = r * B0 * kappa * L / (2.0 * math.pi)
        return cls(B0=B0, phi=phi, L=L, v=v, kappa=kappa, turns=turns)


@dataclass(frozen=True)
class RotatingFrameParams:
    """Effective field magnitude ``B`` (T) and spin cone angle ``theta`` (rad)."""

    B: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.B) and math.isfinite(self.theta)):
            raise ValueError("B and theta must be finite")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")


def helical_field(params: HelicalFieldParams, t) -> np.ndarray:
    """Field seen by the neutron at time ``t``; shape ``(3,) + shape(t)``."""
    t = np.asarray(t, dtype=float)
    wt = params.omega * t
    s, c = math.sin(params.phi), math.cos(params.phi)
    return params.B0 * np.stack(
        [s * np.cos(wt), s * np.sin(wt), np.full_like(wt, c)]
    )


def spin_axis(theta: float, omega: float, t) -> np.ndarray:
    """Unit vector precessing about ``z`` on a cone of half-angle ``theta``."""
    t = np.asarray(t, dtype=float)
    wt = omega * t
    s, c = math.sin(theta), math.cos(theta)
    return np.stack([s * np.cos(wt), s * np.sin(wt), np.full_like(wt, c)])


def spin_axis_rate(theta: float, omega: float, t) -> np.ndarray:
    """Time derivative of :func:`spin_axis`."""
    t = np.asarray(t, dtype=float)
    wt = omega * t
    s = math.sin(theta)
    return np.stack([-omega * s * np.sin(wt), omega * s * np.cos(wt), np.zeros_like(wt)])


def rotating_frame_params(params: HelicalFieldParams) -> RotatingFrameParams:
    """Solve for the effective field ``B`` and cone angle ``theta`` of a helix.

    With ``c = omega/kappa``::

        B     = B0 (B0 + c cos phi) / sqrt(B0^2 + c^2 + 2 B0 c cos phi)
        theta = atan2(B0 sin phi, B0 cos phi + c)      in [0, pi]

    The two-argument arctangent keeps ``sin(theta) >= 0`` when
    ``B0 cos phi + c < 0``.  ``B`` may come out non-positive for ``phi`` near
    ``pi`` when ``c > B0``; that value is returned unchanged.

    Raises
    ------
    DegenerateConfigurationError
        If the rotating-frame field vanishes (``phi = pi`` and ``c = B0``).
    """
    B0, phi, c = params.B0, params.phi, params.c
    x = B0 * math.sin(phi)
    z = B0 * math.cos(phi) + c
    norm = math.hypot(x, z)
    if norm <= _DEGENERATE_RTOL * max(B0, c):
        raise DegenerateConfigurationError(
            f"effective field vanishes for phi={phi!r}, B0={B0!r}, c={c!r}"
        )
    B = B0 * (B0 + c * math.cos(phi)) / norm
    theta = min(max(math.atan2(x, z), 0.0), math.pi)
    return RotatingFrameParams(B=B, theta=theta)


def reconstruct_field(frame: RotatingFrameParams, kappa: float, omega: float, t) -> np.ndarray:
    """Closed-form lab field generated by ``(B, theta)`` rotating at ``omega``."""
    t = np.asarray(t, dtype=float)
    wt = omega * t
    c = omega / kappa
    st, ct = math.sin(frame.theta), math.cos(frame.theta)
    transverse = (frame.B + c * ct) * st
    return np.stack([
        transverse * np.cos(wt),
        transverse * np.sin(wt),
        np.full_like(wt, frame.B * ct - c * st * st),
    ])


def transitionless_field(
    frame: RotatingFrameParams, kappa: float, omega: float, t, axis_rate=None,
) -> np.ndarray:
    """``B*S - (1/kappa) S x dS/dt`` evaluated directly from the spin axis.

    ``axis_rate`` overrides the analytic derivative of ``S`` (e.g. with a
    finite-difference estimate).
    """
    S = spin_axis(frame.theta, omega, t)
    dS = spin_axis_rate(frame.theta, omega, t) if axis_rate is None else np.asarray(axis_rate)
    return frame.B * S - np.cross(S, dS, axis=0) / kappa


def adiabaticity_ratio(params: HelicalFieldParams) -> float:
    """``r = 2 pi v / (kappa L B0)``; small r is the adiabatic regime."""
    return params.c / params.B0


def helical_params_from_frame(
    frame: RotatingFrameParams, *, L: float, v: float, kappa: float, turns: int = 1,
) -> HelicalFieldParams:
    """Helix whose rotating-frame solution is the given ``(B, theta)``.

    Inverse of :func:`rotating_frame_params` for fixed ``L, v, kappa``.  Used to
    build fields with a chosen cone angle, e.g. to scale ``B`` at fixed ``theta``.
    """
    omega = 2.0 * math.pi * v / L
    bx, _, bz = reconstruct_field(frame, kappa, omega, 0.0)
    B0 = math.hypot(float(bx), float(bz))
    phi = math.atan2(float(bx), float(bz))
    if phi < 0:
        raise ValueError("frame requires a left-handed helix (negative transverse field)")
    return HelicalFieldParams(B0=B0, phi=phi, L=L, v=v, kappa=kappa, turns=turns)
