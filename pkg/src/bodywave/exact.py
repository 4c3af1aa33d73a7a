"""Closed-form solution of the two-fluid / rigid-body model problem.

A Gaussian displacement pulse travels rightward through the left fluid,
strikes the (zero-width) body at the origin, and partially transmits into
the right fluid.  d'Alembert decomposition on each side plus the interface
balance reduce the body motion to the scalar ODE

    m vb' + (z_L + z_R) vb = g(t),      vb(0) = V0(0),

whose forcing g collects the incident characteristics.  The ODE integrates
in closed form into exponential-times-erf terms; for small m those terms
suffer catastrophic cancellation, so the small-mass branch rewrites each
product e^P erf(X) through the scaled complement erfcx with the exponent
differences P - X^2 simplified analytically.  For m = 0 the balance is
quasi-steady: vb = g/(z_L + z_R).

Initial data (pulse centered at x0 < 0, width 1/beta):

    U0(x)  = -(sqrt(pi)/(4 beta)) erf(beta (x - x0))
    U0'(x) = -(1/2) exp(-beta^2 (x - x0)^2)
    V0(x)  = (c_L/2) exp(-beta^2 (x - x0)^2)

so the pulse is purely right-moving in the left medium.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt, pi

import numpy as np
from scipy.special import erf, erfcx

from .materials import FluidMaterial

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


class DomainError(ValueError):
    """Evaluation requested outside the solution's space-time domain."""


@dataclass(frozen=True)
class ModelProblem:
    """Two acoustic half-lines coupled to a point body of mass m_body."""

    mat_left: FluidMaterial
    mat_right: FluidMaterial
    m_body: float
    beta: float = 10.0
    x0: float = -0.5

    def __post_init__(self):
        if self.m_body < 0.0 or not np.isfinite(self.m_body):
            raise ValueError(f"m_body must be >= 0, got {self.m_body}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.x0 < 0.0:
            raise ValueError(f"pulse center x0 must be < 0, got {self.x0}")

    @classmethod
    def standard(cls, m_body: float, beta: float = 10.0, x0: float = -0.5) -> "ModelProblem":
        """The reference configuration: rho = 1 both sides, c_L = sqrt(2), c_R = sqrt(3)."""
        return cls(FluidMaterial(1.0, sqrt(2.0)), FluidMaterial(1.0, sqrt(3.0)), m_body, beta, x0)

    @property
    def z_total(self) -> float:
        return self.mat_left.z + self.mat_right.z

    # -- initial data ------------------------------------------------------

    def displacement0(self, x):
        return -(sqrt(pi) / (4.0 * self.beta)) * erf(self.beta * (np.asarray(x, float) - self.x0))

    def strain0(self, x):
        return -0.5 * np.exp(-(self.beta * (np.asarray(x, float) - self.x0)) ** 2)

    def velocity0(self, x):
        return (self.mat_left.c / 2.0) * np.exp(-(self.beta * (np.asarray(x, float) - self.x0)) ** 2)

    def stress0(self, x, side: str):
        kappa = self.mat_left.kappa if side == "left" else self.mat_right.kappa
        return kappa * self.strain0(x)


def body_ode_forcing(prob: ModelProblem, t):
    """g(t): incident-characteristic forcing in m vb' + (zL+zR) vb = g."""
    t = np.asarray(t, dtype=float)
    zl, zr = prob.mat_left.z, prob.mat_right.z
    cl, cr = prob.mat_left.c, prob.mat_right.c
    b, x0 = prob.beta, prob.x0
    return 0.5 * zr * (cl - cr) * np.exp(-(b * (cr * t - x0)) ** 2) + zl * cl * np.exp(
        -(b * (cl * t + x0)) ** 2
    )


def _exp_p_erfc(p, p_minus_x2, x):
    """e^p erfc(x) with p and p - x^2 supplied separately.

    For x >= 0 only the (always representable) e^{p-x^2} erfcx(x) form is
    used; for x < 0 the complement identity needs e^p itself, which is safe
    because p <= 0 whenever an argument goes negative in this solution.
    """
    p, p_minus_x2, x = np.broadcast_arrays(
        np.asarray(p, float), np.asarray(p_minus_x2, float), np.asarray(x, float)
    )
    out = np.empty_like(x)
    pos = x >= 0.0
    out[pos] = np.exp(p_minus_x2[pos]) * erfcx(x[pos])
    neg = ~pos
    out[neg] = 2.0 * np.exp(p[neg]) - np.exp(p_minus_x2[neg]) * erfcx(-x[neg])
    return out


def _vb_terms(prob: ModelProblem, t: np.ndarray):
    """Shared intermediates of the closed-form body velocity (m > 0)."""
    zl, zr, zt = prob.mat_left.z, prob.mat_right.z, prob.z_total
    cl, cr = prob.mat_left.c, prob.mat_right.c
    b, x0, m = prob.beta, prob.x0, prob.m_body
    b2 = b * b

    q_r = cr * t - x0
    den_r = 2.0 * cr * m * b
    a_r = (zt - 2.0 * cr * b2 * m * q_r) / den_r
    b_r = (zt + 2.0 * cr * b2 * m * x0) / den_r
    p_r = zt * (zt - 4.0 * b2 * m * cr * q_r) / den_r**2
    c_r = zr * (cr - cl) * sqrt(pi) / (4.0 * cr * b * m)

    q_l = cl * t + x0
    den_l = 2.0 * cl * m * b
    a_l = (zt - 2.0 * cl * b2 * m * q_l) / den_l
    b_l = (zt - 2.0 * cl * b2 * m * x0) / den_l
    p_l = zt * (zt - 4.0 * cl * b2 * m * q_l) / den_l**2
    c_l_pref = -zl * sqrt(pi) / (2.0 * b * m)

    tail = (prob.mat_left.c / 2.0) * np.exp(-b2 * x0 * x0 - zt * t / m)
    return (q_r, a_r, b_r, p_r, c_r), (q_l, a_l, b_l, p_l, c_l_pref), tail


def _vb_direct(prob: ModelProblem, t: np.ndarray) -> np.ndarray:
    """Plain erf form; accurate when m is not small."""
    (q_r, a_r, b_r, p_r, c_r), (q_l, a_l, b_l, p_l, c_l), tail = _vb_terms(prob, t)
    term_r = c_r * np.exp(p_r) * (erf(a_r) - erf(b_r))
    term_l = c_l * np.exp(p_l) * (erf(a_l) - erf(b_l))
    return term_r + term_l + tail


def _vb_small_mass(prob: ModelProblem, t: np.ndarray) -> np.ndarray:
    """erfcx form: exact rewrite of _vb_direct, stable as m -> 0.

    e^P (erf A - erf B) = e^P erfc(B) - e^P erfc(A), and each e^P erfc(X)
    is evaluated from analytically simplified exponents:

        P_R - A_R^2 = -beta^2 (c_R t - x0)^2      P_R - B_R^2 = -Zt/m - beta^2 x0^2
        P_L - A_L^2 = -beta^2 (c_L t + x0)^2      P_L - B_L^2 = -Zt/m - beta^2 x0^2
    """
    zt, m, b2, x0 = prob.z_total, prob.m_body, prob.beta**2, prob.x0
    (q_r, a_r, b_r, p_r, c_r), (q_l, a_l, b_l, p_l, c_l), tail = _vb_terms(prob, t)
    shared = -zt * t / m - b2 * x0 * x0
    term_r = c_r * (
        _exp_p_erfc(p_r, shared, b_r) - _exp_p_erfc(p_r, -b2 * q_r * q_r, a_r)
    )
    term_l = c_l * (
        _exp_p_erfc(p_l, shared, b_l) - _exp_p_erfc(p_l, -b2 * q_l * q_l, a_l)
    )
    return term_r + term_l + tail


def body_velocity_exact(prob: ModelProblem, t):
    """Exact body velocity at time(s) t >= 0."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise DomainError("t must be >= 0")
    if prob.m_body == 0.0:
        out = body_ode_forcing(prob, t_arr) / prob.z_total
    elif prob.m_body < 0.1:
        out = _vb_small_mass(prob, np.atleast_1d(t_arr))
    else:
        out = _vb_direct(prob, np.atleast_1d(t_arr))
    out = out.reshape(t_arr.shape)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def _cumulative_vb_integral(prob: ModelProblem, taus: np.ndarray) -> np.ndarray:
    """integral of vb from 0 to each tau (taus sorted ascending, >= 0).

    Panels between consecutive taus are split to at most ~1/4 of the pulse
    transit scale and integrated with 12-point Gauss-Legendre, which is far
    below 1e-10 error for these analytic integrands.  When m is small an
    extra geometric refinement resolves the O(m/Z) startup layer.
    """
    c_max = max(prob.mat_left.c, prob.mat_right.c)
    h_max = 0.25 / (prob.beta * c_max)
    edges = [np.asarray([0.0]), taus]
    if prob.m_body > 0.0:
        scale = prob.m_body / prob.z_total
        if scale < h_max:
            edges.append(scale * np.linspace(0.0, 40.0, 21))
    bounds = np.unique(np.concatenate(edges))
    bounds = bounds[bounds <= taus[-1] + 0.0]
    # split any panel wider than h_max
    refined = [np.asarray([bounds[0]])]
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        k = max(1, int(np.ceil((hi - lo) / h_max)))
        refined.append(np.linspace(lo, hi, k + 1)[1:])
    pts = np.concatenate(refined)

    mid = 0.5 * (pts[1:] + pts[:-1])
    half = 0.5 * (pts[1:] - pts[:-1])
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = body_velocity_exact(prob, nodes.ravel()).reshape(nodes.shape)
    panel = half * (vals @ _GL_WEIGHTS)
    cum = np.concatenate(([0.0], np.cumsum(panel)))
    return np.interp(taus, pts, cum)  # taus are panel edges: exact lookup


def body_displacement_exact(prob: ModelProblem, t):
    """Exact body displacement: U0(0) plus the integral of the velocity."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.0):
        raise DomainError("t must be >= 0")
    u0 = float(prob.displacement0(0.0))
    order = np.argsort(t_arr)
    sorted_t = t_arr[order]
    if sorted_t[-1] == 0.0:
        out = np.zeros_like(sorted_t)
    else:
        out = _cumulative_vb_integral(prob, sorted_t)
    result = np.empty_like(out)
    result[order] = out
    result += u0
    return float(result[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else result


def field_exact(prob: ModelProblem, side: str, x, t: float):
    """Exact (v, sigma) on one side at time t (x may be a vector).

    Each side splits into direct and reflected d'Alembert branches; the
    reflected branch carries the body velocity history.
    """
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    if not t >= 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    x = np.asarray(x, dtype=float)
    scalar_in = x.ndim == 0
    x = np.atleast_1d(x)
    if side == "left" and np.any(x > 0.0):
        raise DomainError("left-side x must satisfy x <= 0")
    if side == "right" and np.any(x < 0.0):
        raise DomainError("right-side x must satisfy x >= 0")

    mat = prob.mat_left if side == "left" else prob.mat_right
    c = mat.c

    def f_dir(xi):  # d/dxi of the right-moving primitive
        return 0.5 * (prob.strain0(xi) - prob.velocity0(xi) / c)

    def g_dir(xi):  # d/dxi of the left-moving primitive
        return 0.5 * (prob.strain0(xi) + prob.velocity0(xi) / c)

    if side == "left":
        fp = f_dir(x - c * t)  # always in the direct domain (xi <= 0)
        xi_g = x + c * t
        refl = xi_g >= 0.0
        gp = g_dir(xi_g)
        if np.any(refl):
            xi_r = xi_g[refl]
            gp[refl] = body_velocity_exact(prob, xi_r / c) / c + f_dir(-xi_r)
    else:
        gp = g_dir(x + c * t)  # always direct (xi >= 0)
        xi_f = x - c * t
        refl = xi_f < 0.0
        fp = f_dir(xi_f)
        if np.any(refl):
            xi_r = xi_f[refl]
            fp[refl] = -body_velocity_exact(prob, -xi_r / c) / c + g_dir(-xi_r)

    v = c * (gp - fp)
    sigma = mat.kappa * (fp + gp)
    if scalar_in:
        return float(v[0]), float(sigma[0])
    return v, sigma
