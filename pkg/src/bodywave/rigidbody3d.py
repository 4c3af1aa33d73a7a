"""Added-mass Newton-Euler equations for a rigid body and DIRK integration.

State y = (x_b, v_b, omega, E) obeys

    x_b' = v_b
    m_b v_b' + A^vv v_b + A^vw w + ... = F~        (momentum)
    A w' + A^wv v_b + (A^ww + W A) w = T~          (angular momentum)
    E' = W E,   W = Cross(omega)

with the added-mass tensors on the left-hand side.  Each DIRK stage solves
the implicit system by Newton iteration on the (v, omega) stage slopes; the
E row is linear given omega and the position row is explicit, so the full
21-unknown stage system reduces by block elimination.  Because the
added-mass terms are implicit the step remains well defined as m_b and A
go to zero, provided the composite tensor is nonsingular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import polar

from .addedmass import AddedMassTensors, added_mass_tensors


class SingularStage(RuntimeError):
    """The implicit stage matrix is (numerically) singular."""


class NewtonDivergence(RuntimeError):
    """The stage Newton iteration failed to converge."""


class NonphysicalPressure(ValueError):
    """Surface projection produced a non-positive pressure."""


def cross_matrix(w: np.ndarray) -> np.ndarray:
    """Cross(w): the matrix with Cross(w) a = w x a."""
    w = np.asarray(w, dtype=float)
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


@dataclass(frozen=True)
class RigidBodyState3D:
    """Center of mass, its velocity, angular velocity, and principal axes."""

    x: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        for name in ("x", "v", "omega"):
            vec = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, vec)
            assert vec.shape == (3,), f"{name} must be a 3-vector, got {vec.shape}"
        E = np.asarray(self.E, dtype=float)
        object.__setattr__(self, "E", E)
        assert E.shape == (3, 3)
        drift = np.max(np.abs(E.T @ E - np.eye(3)))
        if drift > 1e-8:
            raise ValueError(f"E is not orthogonal: drift {drift:.3e}")

    @classmethod
    def rest(cls) -> "RigidBodyState3D":
        return cls(np.zeros(3), np.zeros(3), np.zeros(3), np.eye(3))

    def orthogonality_drift(self) -> float:
        return float(np.max(np.abs(self.E.T @ self.E - np.eye(3))))


def _reorthonormalize(E: np.ndarray) -> np.ndarray:
    """Nearest orthogonal matrix (polar factor)."""
    u, _ = polar(E)
    return u


@dataclass(frozen=True)
class BodyInertia:
    """Body mass and moment-of-inertia matrix (both may be zero)."""

    mass: float
    A: np.ndarray

    def __post_init__(self):
        if self.mass < 0.0:
            raise ValueError(f"mass must be >= 0, got {self.mass}")
        A = np.asarray(self.A, dtype=float)
        object.__setattr__(self, "A", A)
        assert A.shape == (3, 3)
        scale = max(np.max(np.abs(A)), 1e-300)
        if np.max(np.abs(A - A.T)) > 1e-10 * scale:
            raise ValueError("inertia matrix must be symmetric")
        if np.linalg.eigvalsh(A).min() < -1e-10 * scale:
            raise ValueError("inertia matrix must be positive semi-definite")

    @classmethod
    def zero(cls) -> "BodyInertia":
        return cls(0.0, np.zeros((3, 3)))


@dataclass(frozen=True)
class PartialForcing:
    """Velocity-independent force/torque parts and the added-mass tensors."""

    f_tilde: np.ndarray
    t_tilde: np.ndarray
    tensors: AddedMassTensors

    def __post_init__(self):
        object.__setattr__(self, "f_tilde", np.asarray(self.f_tilde, dtype=float))
        object.__setattr__(self, "t_tilde", np.asarray(self.t_tilde, dtype=float))
        assert self.f_tilde.shape == (3,) and self.t_tilde.shape == (3,)


def partial_forcing_from_surface(
    samples: list,
    p_f: np.ndarray,
    v_f: np.ndarray,
    f_b: np.ndarray,
    g_b: np.ndarray,
    state: RigidBodyState3D,
) -> PartialForcing:
    """Quadrature of F~ = int(-p_f n + z_f (n.v_f) n) ds + f_b and the
    matching torque with moment arm y = r - x_b; p_f, v_f are the fluid
    pressure/velocity per sample."""
    p_f = np.asarray(p_f, dtype=float)
    v_f = np.asarray(v_f, dtype=float)
    assert p_f.shape == (len(samples),) and v_f.shape == (len(samples), 3)
    nrm = np.array([s.normal for s in samples])
    pos = np.array([s.position for s in samples])
    z = np.array([s.z_f for s in samples])
    w = np.array([s.weight for s in samples])
    strength = (-p_f + z * np.sum(nrm * v_f, axis=1)) * w  # (-p + z n.v) per node
    f_tilde = np.sum(strength[:, None] * nrm, axis=0) + np.asarray(f_b, dtype=float)
    y = pos - state.x
    t_tilde = np.sum(strength[:, None] * np.cross(y, nrm), axis=0) + np.asarray(g_b, dtype=float)
    return PartialForcing(f_tilde, t_tilde, added_mass_tensors(samples, origin=state.x))


def force_and_torque(state: RigidBodyState3D, forcing: PartialForcing):
    """Net force and torque: F = -A^vv v - A^vw w + F~ and likewise T."""
    t = forcing.tensors
    force = -t.avv @ state.v - t.avw @ state.omega + forcing.f_tilde
    torque = -t.awv @ state.v - t.aww @ state.omega + forcing.t_tilde
    return force, torque


@dataclass(frozen=True)
class StateSlope:
    """Time derivative of a rigid-body state; E here is a slope, so no
    orthogonality constraint applies."""

    x: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        for name in ("x", "v", "omega", "E"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        assert self.x.shape == self.v.shape == self.omega.shape == (3,)
        assert self.E.shape == (3, 3)


def added_mass_rhs_residual(
    state_dot: StateSlope,
    state: RigidBodyState3D,
    forcing: PartialForcing,
    inertia: BodyInertia,
) -> np.ndarray:
    """Residual of the added-mass Newton-Euler system, 18 components:
    position (3), momentum (3), angular momentum (3), axes (9)."""
    t = forcing.tensors
    w_mat = cross_matrix(state.omega)
    r_x = state_dot.x - state.v
    r_v = inertia.mass * state_dot.v + t.avv @ state.v + t.avw @ state.omega - forcing.f_tilde
    r_w = (
        inertia.A @ state_dot.omega
        + t.awv @ state.v
        + (t.aww + w_mat @ inertia.A) @ state.omega
        - forcing.t_tilde
    )
    r_e = state_dot.E - w_mat @ state.E
    return np.concatenate([r_x, r_v, r_w, r_e.ravel()])


# -- DIRK integration ---------------------------------------------------------


@dataclass(frozen=True)
class DIRKTableau:
    """Diagonally implicit Runge-Kutta tableau with equal diagonal gamma."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        s = len(b)
        assert a.shape == (s, s) and c.shape == (s,)
        if self.order not in (1, 3):
            raise ValueError(f"order must be 1 or 3, got {self.order}")
        if np.max(np.abs(np.triu(a, 1))) != 0.0:
            raise ValueError("tableau must be lower triangular")
        diag = np.diag(a)
        if diag[0] == 0.0 or np.max(np.abs(diag - diag[0])) > 1e-14:
            raise ValueError("diagonal entries must be equal and nonzero")
        if abs(b.sum() - 1.0) > 1e-14:
            raise ValueError("stage weights must sum to 1")
        if np.max(np.abs(a.sum(axis=1) - c)) > 1e-14:
            raise ValueError("row sums must equal the abscissae")
        if self.order == 3:
            checks = {
                "sum b c = 1/2": b @ c - 0.5,
                "sum b c^2 = 1/3": b @ c**2 - 1.0 / 3.0,
                "sum b a c = 1/6": b @ a @ c - 1.0 / 6.0,
            }
            for name, err in checks.items():
                if abs(err) > 1e-14:
                    raise ValueError(f"order-3 condition failed: {name} (err {err:.2e})")

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def gamma(self) -> float:
        return float(self.a[0, 0])

    @classmethod
    def dirk1(cls) -> "DIRKTableau":
        return cls(np.array([[1.0]]), np.array([1.0]), np.array([1.0]), order=1)

    @classmethod
    def dirk3(cls) -> "DIRKTableau":
        g = 0.5 + np.sqrt(3.0) / 6.0
        a = np.array([[g, 0.0], [-np.sqrt(3.0) / 3.0, g]])
        return cls(a, np.array([0.5, 0.5]), np.array([g, 1.0 - g]), order=3)


def _solve_stage(inertia, forcing, gamma_dt, v_base, omega_base):
    """Newton solve for the stage slopes (k_v, k_w) of the momentum rows."""
    t = forcing.tensors
    m, A = inertia.mass, inertia.A
    k = np.zeros(6)

    def residual_and_jacobian(k):
        vel = v_base + gamma_dt * k[:3]
        omg = omega_base + gamma_dt * k[3:]
        g_v = m * k[:3] + t.avv @ vel + t.avw @ omg - forcing.f_tilde
        g_w = A @ k[3:] + t.awv @ vel + t.aww @ omg + np.cross(omg, A @ omg) - forcing.t_tilde
        jac = np.zeros((6, 6))
        jac[:3, :3] = m * np.eye(3) + gamma_dt * t.avv
        jac[:3, 3:] = gamma_dt * t.avw
        jac[3:, :3] = gamma_dt * t.awv
        jac[3:, 3:] = A + gamma_dt * (
            t.aww + cross_matrix(omg) @ A - cross_matrix(A @ omg)
        )
        return np.concatenate([g_v, g_w]), jac

    g, jac = residual_and_jacobian(k)
    cond = np.linalg.cond(jac)
    if not np.isfinite(cond) or cond > 1e13:
        raise SingularStage(f"stage matrix is singular (condition number {cond:.3e})")
    scale = max(
        1.0,
        np.max(np.abs(forcing.f_tilde)),
        np.max(np.abs(forcing.t_tilde)),
        np.max(np.abs(t.composite)) * (np.max(np.abs(v_base)) + np.max(np.abs(omega_base))),
    )
    for _ in range(25):
        if not np.all(np.isfinite(g)):
            raise NewtonDivergence("stage residual became non-finite")
        if np.max(np.abs(g)) <= 1e-12 * scale:
            return k
        try:
            k = k + np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError as exc:
            raise SingularStage(f"stage Jacobian solve failed: {exc}") from exc
        g, jac = residual_and_jacobian(k)
    raise NewtonDivergence(f"no convergence in 25 iterations (|G| = {np.max(np.abs(g)):.3e})")


def dirk_step(
    state: RigidBodyState3D,
    inertia: BodyInertia,
    forcing_provider,
    tableau: DIRKTableau,
    dt: float,
    t: float = 0.0,
) -> RigidBodyState3D:
    """One DIRK step; forcing_provider(time) returns the PartialForcing at a
    stage time (freeze it to reproduce tensors held fixed over the step)."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    gdt = tableau.gamma * dt
    s = tableau.stages
    k_x = np.zeros((s, 3))
    k_v = np.zeros((s, 3))
    k_w = np.zeros((s, 3))
    k_e = np.zeros((s, 3, 3))
    for i in range(s):
        forcing = forcing_provider(t + tableau.c[i] * dt)
        v_base = state.v + dt * (tableau.a[i, :i] @ k_v[:i])
        w_base = state.omega + dt * (tableau.a[i, :i] @ k_w[:i])
        e_base = state.E + dt * np.tensordot(tableau.a[i, :i], k_e[:i], axes=1)
        k = _solve_stage(inertia, forcing, gdt, v_base, w_base)
        k_v[i], k_w[i] = k[:3], k[3:]
        omega_i = w_base + gdt * k_w[i]
        w_mat = cross_matrix(omega_i)
        # E row: k_e = W (e_base + gdt k_e) is linear; I - gdt W is always
        # nonsingular (eigenvalues 1, 1 +- i gdt |omega|)
        k_e[i] = np.linalg.solve(np.eye(3) - gdt * w_mat, w_mat @ e_base)
        k_x[i] = v_base + gdt * k_v[i]
    x1 = state.x + dt * (tableau.b @ k_x)
    v1 = state.v + dt * (tableau.b @ k_v)
    w1 = state.omega + dt * (tableau.b @ k_w)
    e1 = state.E + dt * np.tensordot(tableau.b, k_e, axes=1)
    if np.max(np.abs(e1.T @ e1 - np.eye(3))) > 1e-10:
        e1 = _reorthonormalize(e1)
    return RigidBodyState3D(x1, v1, w1, e1)


# -- surface state projection -------------------------------------------------


def project_surface_state(
    p_pred: float,
    v_pred: np.ndarray,
    rho_pred: float,
    z_pred: float,
    n: np.ndarray,
    v_body_local: np.ndarray,
    gamma: float,
):
    """Correct a predicted surface fluid state against the body motion:

        v = v_body_local
        p = p_pred - z_pred n.(v_pred - v_body_local)
        rho = rho_pred (p / p_pred)^(1/gamma)

    The density correction preserves the entropy function p / rho^gamma.
    """
    if not (p_pred > 0.0 and rho_pred > 0.0):
        raise ValueError("predicted pressure and density must be > 0")
    if not gamma > 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    if z_pred < 0.0:
        raise ValueError(f"impedance must be >= 0, got {z_pred}")
    v_pred = np.asarray(v_pred, dtype=float)
    n = np.asarray(n, dtype=float)
    v_body_local = np.asarray(v_body_local, dtype=float)
    p = p_pred - z_pred * float(n @ (v_pred - v_body_local))
    if p <= 0.0:
        raise NonphysicalPressure(f"projected pressure {p} <= 0")
    rho = rho_pred * (p / p_pred) ** (1.0 / gamma)
    return p, v_body_local.copy(), rho
