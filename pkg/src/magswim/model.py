"""Geometry, parameters, and field programs for the three-link swimmer.

The swimmer is a planar chain of three rigid slender links of common length
``L``.  The state is ``(x, y, theta, alpha2, alpha3)``: ``(x, y)`` is the
center of the middle link, ``theta`` its orientation, and ``alpha2``,
``alpha3`` are the joint angles of the left and right outer links measured
relative to the middle link.  Link absolute angles are

    theta1 = theta + alpha2      (left link)
    theta2 = theta               (middle link)
    theta3 = theta + alpha3      (right link)

so a "Z" shape (``alpha2 = alpha3``) has parallel outer links.  Each link
carries a magnetic moment of magnitude ``M`` along its tangent, the joints
are elastic with stiffness ``K``, and the ambient fluid acts through
resistive-force drag with per-link tangential and normal coefficients
``xi_i`` and ``eta_i``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

__all__ = [
    "SwimmerParams",
    "Configuration",
    "FieldProgram",
    "ConstantField",
    "SinusoidalField",
    "TabulatedField",
    "SegmentFrames",
    "segment_frames",
    "apply_R_transform",
]


@dataclass(frozen=True)
class SwimmerParams:
    """Physical parameters of the swimmer.

    ``xi`` and ``eta`` are the tangential and normal drag coefficients per
    link, ordered (left, middle, right).  ``M`` is the total magnetic moment
    of one link and ``K`` the joint stiffness.  Anisotropic slender-body drag
    has ``eta_i > xi_i``; the constructor warns (but does not fail) when a
    link violates that, since the assembly itself is well defined either way.
    """

    L: float
    xi: tuple[float, float, float]
    eta: tuple[float, float, float]
    K: float
    M: float

    def __init__(self, L: float, xi: Sequence[float], eta: Sequence[float],
                 K: float, M: float) -> None:
        object.__setattr__(self, "L", float(L))
        object.__setattr__(self, "xi", tuple(float(v) for v in xi))
        object.__setattr__(self, "eta", tuple(float(v) for v in eta))
        object.__setattr__(self, "K", float(K))
        object.__setattr__(self, "M", float(M))
        self._validate()

    def _validate(self) -> None:
        if len(self.xi) != 3 or len(self.eta) != 3:
            raise ValueError("xi and eta must each have three entries")
        vals = (self.L, self.K, self.M) + self.xi + self.eta
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("swimmer parameters must be finite")
        if self.L <= 0.0:
            raise ValueError("link length L must be positive")
        if self.K < 0.0:
            raise ValueError("joint stiffness K must be nonnegative")
        if self.M < 0.0:
            raise ValueError("magnetic moment M must be nonnegative")
        if any(v <= 0.0 for v in self.xi) or any(v <= 0.0 for v in self.eta):
            raise ValueError("drag coefficients must be positive")
        if any(e < x for x, e in zip(self.xi, self.eta)):
            warnings.warn(
                "eta_i < xi_i on at least one link; slender-body drag "
                "normally has eta_i > xi_i",
                stacklevel=3,
            )

    @classmethod
    def uniform(cls, L: float, xi: float, eta: float, K: float,
                M: float) -> "SwimmerParams":
        """All three links share one ``xi`` and one ``eta``."""
        return cls(L, (xi, xi, xi), (eta, eta, eta), K, M)

    def equal_coefficients(self) -> bool:
        """True when all links share the same drag coefficients."""
        return (self.xi[0] == self.xi[1] == self.xi[2]
                and self.eta[0] == self.eta[1] == self.eta[2])

    def with_magnetization(self, M: float) -> "SwimmerParams":
        return replace(self, M=M)


@dataclass(frozen=True)
class Configuration:
    """A point of the five-dimensional configuration space.

    Angles are kept unwrapped; nothing in the dynamics needs them reduced
    modulo 2 pi and unwrapped angles keep trajectories continuous.
    """

    x: float
    y: float
    theta: float
    alpha2: float
    alpha3: float

    def __post_init__(self) -> None:
        vals = (self.x, self.y, self.theta, self.alpha2, self.alpha3)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValueError("configuration entries must be finite")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.x, self.y, self.theta, self.alpha2, self.alpha3],
            dtype=float,
        )

    @classmethod
    def from_array(cls, q: Sequence[float]) -> "Configuration":
        q = np.asarray(q, dtype=float)
        if q.shape != (5,):
            raise ValueError("configuration array must have shape (5,)")
        return cls(*(float(v) for v in q))

    @classmethod
    def straight(cls, theta: float = 0.0) -> "Configuration":
        return cls(0.0, 0.0, float(theta), 0.0, 0.0)


class FieldProgram:
    """Time program of the external field ``H(t) = (Hx(t), Hy(t))``."""

    kind: str = "abstract"

    def sample(self, t: float) -> tuple[float, float]:
        raise NotImplementedError

    def negated(self) -> "FieldProgram":
        """The program ``t -> -H(t)`` (used by the time-reversal check)."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantField(FieldProgram):
    hx: float = 0.0
    hy: float = 0.0
    kind: str = "constant"

    def sample(self, t: float) -> tuple[float, float]:
        return (self.hx, self.hy)

    def negated(self) -> "ConstantField":
        return ConstantField(-self.hx, -self.hy)


@dataclass(frozen=True)
class SinusoidalField(FieldProgram):
    """``H(t) = (hx0, epsilon * sin(omega * t))``.

    The steady x-component sets the straight equilibrium; the transverse
    sinusoid is the actuation.  ``omega`` must be positive so the period
    ``T = 2 pi / omega`` is well defined.
    """

    hx0: float = 1.0
    epsilon: float = 0.0
    omega: float = 1.0
    kind: str = "sinusoidal"

    def __post_init__(self) -> None:
        if not (self.omega > 0.0):
            raise ValueError("omega must be positive")
        if not all(math.isfinite(v) for v in (self.hx0, self.epsilon, self.omega)):
            raise ValueError("field parameters must be finite")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def sample(self, t: float) -> tuple[float, float]:
        return (self.hx0, self.epsilon * math.sin(self.omega * t))

    def negated(self) -> "SinusoidalField":
        return SinusoidalField(-self.hx0, -self.epsilon, self.omega)


class TabulatedField(FieldProgram):
    """Piecewise-linear interpolation of sampled ``(t, Hx, Hy)`` rows.

    Sample times must be strictly increasing.  Queries outside the sampled
    range clamp to the end values (the np.interp convention); integrations
    should stay inside the table.
    """

    kind = "tabulated"

    def __init__(self, times: Sequence[float], hx: Sequence[float],
                 hy: Sequence[float]) -> None:
        t = np.asarray(times, dtype=float)
        hx = np.asarray(hx, dtype=float)
        hy = np.asarray(hy, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("tabulated field needs at least two samples")
        if hx.shape != t.shape or hy.shape != t.shape:
            raise ValueError("times, hx, hy must have matching shapes")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(hx)) \
                or not np.all(np.isfinite(hy)):
            raise ValueError("tabulated field samples must be finite")
        if not np.all(np.diff(t) > 0.0):
            raise ValueError("sample times must be strictly increasing")
        self.times = t
        self.hx = hx
        self.hy = hy

    def sample(self, t: float) -> tuple[float, float]:
        return (
            float(np.interp(t, self.times, self.hx)),
            float(np.interp(t, self.times, self.hy)),
        )

    def negated(self) -> "TabulatedField":
        return TabulatedField(self.times, -self.hx, -self.hy)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, TabulatedField)
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.hx, other.hx)
                and np.array_equal(self.hy, other.hy))


@dataclass(frozen=True)
class SegmentFrames:
    """Endpoints, centers, and orthonormal frames of the three links.

    ``endpoints`` stacks the four chain points A1..A4 (shape (4, 2)); link i
    runs from ``endpoints[i]`` to ``endpoints[i+1]``.  ``tangents[i]`` and
    ``normals[i]`` are the unit tangent/normal of link i and ``angles[i]``
    its absolute angle.
    """

    endpoints: np.ndarray
    centers: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    angles: np.ndarray


def segment_frames(config: Configuration, params: SwimmerParams) -> SegmentFrames:
    """Assemble the per-link frames for a configuration.

    The chain closes by construction: ``endpoints[i+1] - endpoints[i]``
    equals ``L * tangents[i]`` exactly.
    """
    L = params.L
    th1 = config.theta + config.alpha2
    th2 = config.theta
    th3 = config.theta + config.alpha3
    angles = np.array([th1, th2, th3])
    tangents = np.column_stack([np.cos(angles), np.sin(angles)])
    normals = np.column_stack([-np.sin(angles), np.cos(angles)])
    c2 = np.array([config.x, config.y])
    a2 = c2 - 0.5 * L * tangents[1]
    a3 = c2 + 0.5 * L * tangents[1]
    a1 = a2 - L * tangents[0]
    a4 = a3 + L * tangents[2]
    endpoints = np.vstack([a1, a2, a3, a4])
    centers = np.vstack([
        0.5 * (a1 + a2),
        c2,
        0.5 * (a3 + a4),
    ])
    return SegmentFrames(endpoints=endpoints, centers=centers,
                         tangents=tangents, normals=normals, angles=angles)


def apply_R_transform(config: Configuration,
                      h: tuple[float, float]) -> tuple[Configuration, tuple[float, float]]:
    """The discrete symmetry: rotate the swimmer by pi and negate the field.

    On coordinates this reads ``(x, y, theta, a2, a3) -> (-x, -y, theta,
    a3, a2)`` together with ``H -> -H``.  Applying it twice is the identity.
    """
    cfg = Configuration(-config.x, -config.y, config.theta,
                        config.alpha3, config.alpha2)
    return cfg, (-h[0], -h[1])
