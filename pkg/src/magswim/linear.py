"""Linearized analysis around the straight, field-aligned equilibrium.

With the steady field component scaled to ``Hx = 1`` and lengths to the
link length, the shape coordinates ``q = (theta, alpha2, alpha3)`` obey

    qdot = g(q) + gy(q) * Hy(t),      g = g0 + gx,

and ``q = 0`` is an equilibrium.  For the weak transverse drive
``Hy = eps sin(omega t)`` the response at first order in eps is governed by
``A = grad g(0)`` and ``b = gy(0)``:

    qdot = A q + b eps sin(omega t).

The steady periodic orbit of that system, pushed through the quadratic
term of the x-displacement map, produces the per-cycle net displacement at
order eps^2.  Everything in this module is that chain: the numeric and
closed-form ``A``, stability of ``A``, the resolvent orbit, and the two
independent evaluations of the quadratic displacement.

Closed forms assume the head-asymmetric drag pattern: links 2 and 3 share
coefficients (xi, eta), link 1 may differ (xi1, eta1).  They are exact in
that regime; the numeric paths work for any parameters.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import _assemble, _unpack, make_rate_function
from .errors import AnalysisError
from .model import SwimmerParams

__all__ = [
    "LinearizedModel",
    "PeriodicOrbit",
    "DisplacementCurve",
    "linearize_angles",
    "closed_form_angle_matrix",
    "char_poly",
    "routh_hurwitz_stable",
    "closed_form_char_coeffs",
    "resolvents",
    "steady_periodic",
    "grad_gx_origin",
    "closed_form_grad_gx",
    "skew_kernel",
    "closed_form_skew_kernel",
    "net_displacement_quadratic",
    "frequency_sweep",
    "displacement_model",
]

WORKERS_ENV_VAR = "MAGSWIM_WORKERS"
QUADRATURE_SAMPLES = 4096


@dataclass(frozen=True)
class LinearizedModel:
    """Shape-space linearization: ``qdot = a q + b Hy``.

    ``source`` records how the entries were obtained ("numeric" for finite
    differences of the assembled dynamics, "closed-form" for the analytic
    expressions).
    """

    a: np.ndarray
    b: np.ndarray
    source: str


def _require_head_asymmetric(params: SwimmerParams) -> None:
    if params.xi[1] != params.xi[2] or params.eta[1] != params.eta[2]:
        raise ValueError(
            "closed forms need links 2 and 3 to share drag coefficients")


def _angle_rate(params: SwimmerParams):
    """Shape velocity (theta, alpha2, alpha3) as a function of shape."""
    rate = make_rate_function(params)

    def g(q: np.ndarray, hx: float, hy: float) -> np.ndarray:
        state = np.array([0.0, 0.0, q[0], q[1], q[2]])
        return rate(state, hx, hy)[2:]

    return g


def linearize_angles(params: SwimmerParams,
                     step: float = 1e-6) -> LinearizedModel:
    """Finite-difference ``A`` and ``b`` at the straight equilibrium.

    Central differences with a fixed step; the assembled rates are smooth
    and order-one near the origin, so 1e-6 balances truncation against
    roundoff at about 1e-10 relative.
    """
    g = _angle_rate(params)
    a = np.empty((3, 3))
    for j in range(3):
        dq = np.zeros(3)
        dq[j] = step
        a[:, j] = (g(dq, 1.0, 0.0) - g(-dq, 1.0, 0.0)) / (2.0 * step)
    b = g(np.zeros(3), 0.0, 1.0)
    return LinearizedModel(a=a, b=b, source="numeric")


def closed_form_angle_matrix(params: SwimmerParams) -> LinearizedModel:
    """Analytic ``A`` and ``b`` for the head-asymmetric swimmer.

    ``b`` equals the negated first column of ``A``: tilting the swimmer
    relative to the field axis and tilting the field relative to the
    swimmer are the same perturbation to first order.
    """
    _require_head_asymmetric(params)
    L, K, M = params.L, params.K, params.M
    eta1, eta = params.eta[0], params.eta[1]
    d = 6.0 / (L ** 3 * eta * eta1 * (8.0 * eta + 7.0 * eta1))
    a = d * np.array([
        [M * eta1 * (5 * eta + eta1),
         (19 * K + 9 * M) * eta * eta1 + 2 * K * eta1 ** 2,
         2 * (8 * K + 3 * M) * eta * eta1 + (5 * K + 3 * M) * eta1 ** 2],
        [-M * (4 * eta ** 2 + 13 * eta1 * eta + eta1 ** 2),
         -4 * (K + M) * eta ** 2 - (42 * K + 23 * M) * eta1 * eta
         - 2 * K * eta1 ** 2,
         -(28 * K + 9 * M) * eta * eta1 - (5 * K + 3 * M) * eta1 ** 2],
        [-6 * M * (2 * eta * eta1 + eta1 ** 2),
         -4 * (7 * K + 3 * M) * eta * eta1 - 5 * K * eta1 ** 2,
         -16 * (2 * K + M) * eta * eta1 - (16 * K + 11 * M) * eta1 ** 2],
    ])
    return LinearizedModel(a=a, b=-a[:, 0].copy(), source="closed-form")


def char_poly(a: np.ndarray) -> tuple[float, float, float, float]:
    """Coefficients of ``det(a - lam I) = a3 lam^3 + a2 lam^2 + a1 lam + a0``.

    Built from the trace, the principal 2x2 minors, and the determinant,
    so ``a3`` is always exactly -1.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 3):
        raise ValueError("char_poly expects a 3x3 matrix")
    tr = float(np.trace(a))
    minors = 0.0
    for (i, j) in ((0, 1), (0, 2), (1, 2)):
        minors += float(a[i, i] * a[j, j] - a[i, j] * a[j, i])
    det = float(np.linalg.det(a))
    return (-1.0, tr, -minors, det)


def routh_hurwitz_stable(coeffs: tuple[float, float, float, float]) -> bool:
    """Strict Hurwitz test for a cubic ``a3 x^3 + a2 x^2 + a1 x + a0``.

    All four coefficients must share a strict sign and the pair product
    condition ``a2 a1 > a3 a0`` must hold.
    """
    a3, a2, a1, a0 = (float(c) for c in coeffs)
    if a3 == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    same_sign = (a3 > 0 and a2 > 0 and a1 > 0 and a0 > 0) or \
                (a3 < 0 and a2 < 0 and a1 < 0 and a0 < 0)
    return bool(same_sign and a2 * a1 > a3 * a0)


def closed_form_char_coeffs(params: SwimmerParams
                            ) -> tuple[float, float, float, float]:
    """Characteristic coefficients of the closed-form ``A``, normalized to
    leading coefficient -1."""
    _require_head_asymmetric(params)
    L, K, M = params.L, params.K, params.M
    eta1, eta = params.eta[0], params.eta[1]
    pole = 8.0 * eta * eta1 + 7.0 * eta1 ** 2
    n2 = (K * (2 * eta ** 2 + 37 * eta * eta1 + 9 * eta1 ** 2)
          + M * (2 * eta ** 2 + 17 * eta * eta1 + 5 * eta1 ** 2))
    n1 = (K ** 2 * (16 * eta ** 2 + 64 * eta * eta1 + eta1 ** 2)
          + K * M * (31 * eta ** 2 + 98 * eta * eta1 + 3 * eta1 ** 2)
          + M ** 2 * (10 * eta ** 2 + 28 * eta * eta1 + eta1 ** 2))
    n0 = M * (K + M) * (3 * K + M) * (2 * eta + eta1)
    a2 = -12.0 * n2 / (L ** 3 * eta * pole)
    a1 = -36.0 * n1 / (L ** 6 * eta ** 2 * pole)
    a0 = -432.0 * n0 / (L ** 9 * eta ** 2 * pole)
    return (-1.0, a2, a1, a0)


def resolvents(a: np.ndarray, omega: float
               ) -> tuple[np.ndarray, np.ndarray]:
    """``(-a + i omega I)^-1`` and ``(-a - i omega I)^-1``."""
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    a = np.asarray(a, dtype=float)
    eye = np.eye(a.shape[0])
    a_plus = np.linalg.inv(-a + 1j * omega * eye)
    a_minus = np.linalg.inv(-a - 1j * omega * eye)
    return a_plus, a_minus


@dataclass(frozen=True)
class PeriodicOrbit:
    """Steady response of ``qdot = a q + b sin(omega t)`` per unit drive.

    The orbit is ``q(t) = Im(c_plus e^{i omega t})`` with
    ``c_plus = (-a + i omega)^-1 b``; its time derivative follows by
    differentiating inside the imaginary part.
    """

    omega: float
    c_plus: np.ndarray

    def shape(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * self.omega * t)
        return np.imag(np.multiply.outer(phase, self.c_plus))

    def rate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * self.omega * t)
        return self.omega * np.real(np.multiply.outer(phase, self.c_plus))


def steady_periodic(a: np.ndarray, b: np.ndarray,
                    omega: float) -> PeriodicOrbit:
    a_plus, _ = resolvents(a, omega)
    return PeriodicOrbit(omega=float(omega), c_plus=a_plus @ b)


def grad_gx_origin(params: SwimmerParams, step: float = 1e-6) -> np.ndarray:
    """Gradient of the x-row of the position coupling at the origin.

    Entry ``[j, k]`` is the derivative of ``Gx_k`` along shape coordinate
    ``j``, where ``xdot = Gx(q) . qdot``.  ``Gx(0) = 0`` by symmetry, so
    this gradient carries the entire quadratic displacement.
    """
    def gx_row(q: np.ndarray) -> np.ndarray:
        # recover G's x-row from the force balance alone: with zero net
        # force, (xdot, ydot) = -Ah^-1 Bh (angle rates)
        mh, _, _ = _assemble(q[0], q[1], q[2], *_unpack(params), params.M)
        g = -np.linalg.solve(mh[:2, :2], mh[:2, 2:])
        return g[0, :]

    out = np.empty((3, 3))
    for j in range(3):
        dq = np.zeros(3)
        dq[j] = step
        out[j, :] = (gx_row(dq) - gx_row(-dq)) / (2.0 * step)
    return out


def closed_form_grad_gx(params: SwimmerParams) -> np.ndarray:
    """Analytic gradient of the coupling x-row, head-asymmetric pattern."""
    _require_head_asymmetric(params)
    L = params.L
    xi1, xi = params.xi[0], params.xi[1]
    eta1, eta = params.eta[0], params.eta[1]
    pref = L / (2.0 * (2.0 * eta + eta1))
    den = 2.0 * xi + xi1
    return pref * np.array([
        [2 * (eta - eta1), -eta1, eta],
        [-(6 * eta * eta1 - 4 * eta * xi1 + eta1 * xi1) / den,
         -eta1 * (2 * eta + xi1) / den,
         -eta * (eta1 - xi1) / den],
        [(2 * eta ** 2 + 4 * eta * eta1 - 3 * eta1 * xi) / den,
         eta1 * (eta - xi) / den,
         eta * (eta + eta1 + xi) / den],
    ])


def skew_kernel(w: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Unit kernel vector of a skew-symmetric 3x3 matrix.

    A 3x3 skew matrix is the cross-product map of a single vector; that
    vector spans its kernel.  Raises if ``w`` is not skew or the kernel
    residual exceeds ``tol``.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (3, 3):
        raise ValueError("skew_kernel expects a 3x3 matrix")
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.max(np.abs(w + w.T)) > tol * scale:
        raise ValueError("matrix is not skew-symmetric")
    u = np.array([w[1, 2], -w[0, 2], w[0, 1]])
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ValueError("skew matrix is zero; kernel is everything")
    u = u / norm
    if np.max(np.abs(w @ u)) > tol * scale:
        raise ValueError("kernel residual above tolerance")
    return u


def closed_form_skew_kernel(params: SwimmerParams) -> np.ndarray:
    """Unit kernel of ``grad Gx - (grad Gx)^T`` from the analytic entries."""
    _require_head_asymmetric(params)
    xi1, xi = params.xi[0], params.xi[1]
    eta1, eta = params.eta[0], params.eta[1]
    u = np.array([
        eta1 * xi + eta * xi1 - 2 * eta * eta1,
        2 * eta ** 2 + 4 * eta1 * eta - 2 * xi * eta - xi1 * eta
        - 3 * eta1 * xi,
        6 * eta * eta1 - 2 * xi * eta1 - 4 * eta * xi1,
    ])
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise ValueError("kernel vector degenerates for these parameters")
    return u / norm


@dataclass(frozen=True)
class _QuadraticModel:
    a: np.ndarray
    b: np.ndarray
    grad_gx: np.ndarray


def displacement_model(params: SwimmerParams) -> _QuadraticModel:
    """Numeric (A, b, grad Gx) bundle used by the displacement formulas."""
    lin = linearize_angles(params)
    coeffs = char_poly(lin.a)
    if not routh_hurwitz_stable(coeffs):
        raise AnalysisError(
            "straight equilibrium is not strictly stable; periodic "
            "response is undefined")
    return _QuadraticModel(a=lin.a, b=lin.b, grad_gx=grad_gx_origin(params))


def _dx2_resolvent(model: _QuadraticModel, omega: float) -> float:
    a_plus, a_minus = resolvents(model.a, omega)
    w = model.grad_gx - model.grad_gx.T
    z = model.b @ (a_plus.T @ (w @ (a_minus @ model.b)))
    # z is purely imaginary up to roundoff; its real part is a numerical
    # residue and must stay tiny
    if abs(z.real) > 1e-10 * max(1.0, abs(z.imag)):
        raise AnalysisError(
            f"resolvent quadratic form has real residue {z.real:.3e}")
    return (2.0 * math.pi / omega) * (omega / 4.0) * float(z.imag)


def _dx2_quadrature(model: _QuadraticModel, omega: float,
                    samples: int = QUADRATURE_SAMPLES) -> float:
    orbit = steady_periodic(model.a, model.b, omega)
    period = 2.0 * math.pi / omega
    ts = np.linspace(0.0, period, samples, endpoint=False)
    q = orbit.shape(ts)
    qdot = orbit.rate(ts)
    integrand = np.einsum("tj,jk,tk->t", q, model.grad_gx, qdot)
    # uniform grid over one period: the trapezoid rule is spectrally
    # accurate for this smooth periodic integrand
    return float(integrand.mean() * period)


def net_displacement_quadratic(params: SwimmerParams, omega: float,
                               model: _QuadraticModel | None = None) -> float:
    """Per-cycle x-displacement at quadratic order, per unit eps^2.

    Evaluates both the closed resolvent expression and the time-domain
    quadrature of the steady orbit, and insists they agree to 1e-8; a gap
    means the linearization or the orbit reconstruction is broken, so it
    raises instead of returning either number.
    """
    if model is None:
        model = displacement_model(params)
    via_resolvent = _dx2_resolvent(model, omega)
    via_quadrature = _dx2_quadrature(model, omega)
    gap = abs(via_resolvent - via_quadrature)
    if gap > 1e-8 * max(1.0, abs(via_quadrature)):
        raise AnalysisError(
            f"displacement paths disagree by {gap:.3e} at omega = {omega:g}")
    return via_resolvent


@dataclass(frozen=True)
class DisplacementCurve:
    """A frequency sweep of the quadratic displacement.

    ``omega_star`` maximizes ``|dx2|``; when the grid maximum sits on the
    boundary the refinement is skipped and ``boundary`` is set.
    ``near_zero`` flags curves that vanish to roundoff (equal-coefficient
    swimmers cannot translate at this order).
    """

    omegas: np.ndarray
    dx2: np.ndarray
    omega_star: float
    dx2_star: float
    boundary: bool
    near_zero: bool


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        return max(1, int(env))
    return os.cpu_count() or 1


def _golden_max(f, lo: float, hi: float, rel_tol: float = 1e-6) -> float:
    """Golden-section maximizer on [lo, hi] for a unimodal bracket."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * b:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def frequency_sweep(params: SwimmerParams, omega_min: float,
                    omega_max: float, n_grid: int = 64,
                    workers: int | None = None) -> DisplacementCurve:
    """Sweep ``dx2`` over a log-spaced grid and refine the peak.

    The grid is evaluated by a worker pool (size from the ``workers``
    argument, else the MAGSWIM_WORKERS environment variable, else the cpu
    count) and merged back in grid order, so results do not depend on the
    pool size.  The peak of ``|dx2|`` is then refined by golden section
    inside its bracketing grid cell to 1e-6 relative.
    """
    if not (0.0 < omega_min < omega_max):
        raise ValueError("need 0 < omega_min < omega_max")
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    model = displacement_model(params)
    omegas = np.logspace(math.log10(omega_min), math.log10(omega_max),
                         n_grid)
    count = _worker_count(workers)
    evaluate = lambda w: net_displacement_quadratic(params, w, model=model)
    if count == 1:
        dx2 = np.array([evaluate(w) for w in omegas])
    else:
        with ThreadPoolExecutor(max_workers=count) as pool:
            dx2 = np.array(list(pool.map(evaluate, omegas)))
    peak = int(np.argmax(np.abs(dx2)))
    scale = float(np.max(np.abs(dx2)))
    near_zero = scale <= 1e-12
    boundary = peak in (0, n_grid - 1)
    if near_zero:
        # a curve that is zero to roundoff has no meaningful peak
        omega_star = float(omegas[peak])
    elif boundary:
        warnings.warn(
            "displacement peak sits on the sweep boundary; widen the "
            "frequency range", stacklevel=2)
        omega_star = float(omegas[peak])
    else:
        omega_star = _golden_max(
            lambda w: abs(evaluate(w)),
            float(omegas[peak - 1]), float(omegas[peak + 1]))
    return DisplacementCurve(
        omegas=omegas, dx2=dx2, omega_star=omega_star,
        dx2_star=evaluate(omega_star), boundary=boundary,
        near_zero=near_zero)
