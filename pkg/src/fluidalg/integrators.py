"""Time integration of the Euler ODE with optional invariant projection.

Fixed-step classical RK4 only; conservation order studies need controlled
steps.  The projected variant pulls each step back onto the intersection
of the energy sphere with the helicity level set by a two-parameter Newton
correction in span{X, DX} (the metric gradients of the two invariants).

A probe field Z can be co-evolved with dZ/dt = D' T(X, D Z), using the same
RK4 stages and stage-consistent X values, to measure the invariance of the
probe linking <X, Z> numerically.

A single integration is sequential; separate integrations are independent
and may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FluidAlgebra, curl, energy, helicity, linking
from .dynamics import euler_rhs

__all__ = [
    "ProjectionSettings",
    "IntegratorSpec",
    "TraceRecord",
    "IntegrationResult",
    "ProjectionError",
    "NumericalFailure",
    "rk4_step",
    "co_evolve_probe",
    "project_to_invariants",
    "integrate",
]

METHODS = ("rk4", "rk4-projected")

# Condition number of the 2x2 Newton system above which the correction
# directions X and DX are treated as parallel (DX || X) and projection
# degrades to the energy-only rescaling.
_NEWTON_SINGULAR_COND = 1e10


class ProjectionError(RuntimeError):
    """Newton projection failed to converge within its iteration budget."""


class NumericalFailure(RuntimeError):
    """A non-finite value appeared during integration."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class ProjectionSettings:
    max_iter: int = 10
    tol: float = 1e-12  # relative constraint tolerance


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 1.0
    record_every: int = 1
    projection: ProjectionSettings = field(default_factory=ProjectionSettings)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"method must be one of {METHODS}, got {self.method!r}"
            )
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class TraceRecord:
    t: float
    state: np.ndarray
    energy: float
    helicity: float
    probe_linking: float | None = None
    flag: str = ""


@dataclass
class IntegrationResult:
    records: list
    steps: int
    failed: bool = False
    failure_message: str = ""
    projection_failures: int = 0

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def _checked(stage: np.ndarray, label: str, t: float) -> np.ndarray:
    if not np.all(np.isfinite(stage)):
        raise NumericalFailure(f"non-finite value in {label} at t={t!r}", t)
    return stage


def _stage_rhs(alg, X, label: str, t: float) -> np.ndarray:
    try:
        return euler_rhs(alg, X)
    except FloatingPointError as exc:
        raise NumericalFailure(f"non-finite value in {label} at t={t!r}",
                               t) from exc


def rk4_step(alg: FluidAlgebra, X, dt: float, t0: float = 0.0) -> np.ndarray:
    """One classical RK4 step of dX/dt = euler_rhs(X)."""
    X = alg.state(X, "X")
    k1 = _stage_rhs(alg, X, "stage 1", t0)
    k2 = _stage_rhs(alg, X + 0.5 * dt * k1, "stage 2", t0)
    k3 = _stage_rhs(alg, X + 0.5 * dt * k2, "stage 3", t0)
    k4 = _stage_rhs(alg, X + dt * k3, "stage 4", t0)
    out = X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return _checked(out, "step result", t0 + dt)


def _probe_rhs(alg: FluidAlgebra, X, Z) -> np.ndarray:
    # dZ/dt = D' T(X, D Z); since T(X, W) = G^-1 D^T contract(X, W) and
    # D' D = id, this collapses to a single metric solve.
    b = alg.triple.contract_pair(X, curl(alg, Z))
    return alg.solve_metric(b)


def _rk4_joint(alg: FluidAlgebra, X, Z, dt: float, t0: float):
    """RK4 step of the coupled (velocity, probe) system.

    The probe stages see the velocity at its stage-consistent values, which
    is what makes the probe linking drift a pure order-4 integrator error.
    """
    k1x = _stage_rhs(alg, X, "stage 1", t0)
    k1z = _probe_rhs(alg, X, Z)
    x2 = X + 0.5 * dt * k1x
    k2x = _stage_rhs(alg, x2, "stage 2", t0)
    k2z = _probe_rhs(alg, x2, Z + 0.5 * dt * k1z)
    x3 = X + 0.5 * dt * k2x
    k3x = _stage_rhs(alg, x3, "stage 3", t0)
    k3z = _probe_rhs(alg, x3, Z + 0.5 * dt * k2z)
    x4 = X + dt * k3x
    k4x = _stage_rhs(alg, x4, "stage 4", t0)
    k4z = _probe_rhs(alg, x4, Z + dt * k3z)
    X1 = X + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    Z1 = Z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    return (
        _checked(X1, "step result", t0 + dt),
        _checked(Z1, "probe step result", t0 + dt),
    )


def co_evolve_probe(alg: FluidAlgebra, X, Z, dt: float,
                    t0: float = 0.0) -> np.ndarray:
    """Advance the probe by one RK4 step of dZ/dt = D' T(X, D Z).

    X is advanced internally along its own Euler stages so the probe sees
    stage-consistent velocity values; only the new probe is returned.
    """
    X = alg.state(X, "X")
    Z = alg.state(Z, "Z")
    _, Z1 = _rk4_joint(alg, X, Z, dt, t0)
    return Z1


def project_to_invariants(alg: FluidAlgebra, X, E0: float, H0: float,
                          settings: ProjectionSettings = ProjectionSettings(),
                          ) -> np.ndarray:
    """Pull X back onto {energy = E0, helicity = H0}.

    The corrected state is X' = (1 + 2a) X + 2b DX, the minimal correction
    within the span of the two constraint gradients; (a, b) solve the two
    constraint equations by Newton iteration.  When DX is parallel to X the
    2x2 system is singular (detected at condition number 1e10) and the
    projection falls back to the energy-only radial rescaling.

    Returns X' with |energy - E0| <= tol * E0 and
    |helicity - H0| <= tol * max(|H0|, E0); raises ProjectionError if the
    iteration budget is exhausted first.
    """
    X = alg.state(X, "X")
    e_tol = settings.tol * E0
    h_tol = settings.tol * max(abs(H0), E0)

    def _converged(u):
        return (
            abs(energy(alg, u) - E0) <= e_tol
            and abs(helicity(alg, u) - H0) <= h_tol
        )

    if _converged(X):
        return X

    DX = curl(alg, X)
    GX = alg.metric @ X
    GD = alg.metric @ DX
    LX = alg.linking @ X
    LD = alg.linking @ DX
    a = b = 0.0
    for _ in range(settings.max_iter):
        u = (1.0 + 2.0 * a) * X + (2.0 * b) * DX
        fE = energy(alg, u) - E0
        fH = helicity(alg, u) - H0
        if abs(fE) <= e_tol and abs(fH) <= h_tol:
            return u
        J = np.array(
            [
                [4.0 * (u @ GX), 4.0 * (u @ GD)],
                [4.0 * (u @ LX), 4.0 * (u @ LD)],
            ]
        )
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > _NEWTON_SINGULAR_COND:
            # DX || X: energy and helicity constraints are not independent
            e_now = energy(alg, X)
            if e_now <= 0.0:
                return X
            return X * np.sqrt(E0 / e_now)
        da, db = np.linalg.solve(J, [-fE, -fH])
        a += da
        b += db
    u = (1.0 + 2.0 * a) * X + (2.0 * b) * DX
    if _converged(u):
        return u
    raise ProjectionError(
        f"projection did not converge in {settings.max_iter} iterations"
    )


def _plan_steps(dt: float, t_end: float):
    """Number of full dt steps plus an optional closing remainder step."""
    if t_end == 0.0:
        return 0, 0.0
    ratio = t_end / dt
    n = int(round(ratio))
    if n > 0 and abs(n * dt - t_end) <= 1e-9 * max(dt, t_end):
        return n, 0.0
    n = int(np.floor(ratio))
    return n, t_end - n * dt


def integrate(alg: FluidAlgebra, X0, spec: IntegratorSpec,
              probe=None) -> IntegrationResult:
    """Advance X from t=0 to t=t_end, recording invariants along the way.

    Records are taken at t=0, every ``record_every`` steps, and at t_end.
    With a probe, Z is co-advanced through the same RK4 stages and the
    record carries the probe linking <X, Z>.  With method "rk4-projected",
    every step is followed by the invariant projection; a projection
    failure falls back to the unprojected step and flags the record.

    On numerical failure the partial trace is preserved and the result is
    marked failed.
    """
    X = alg.state(X0, "X0")
    Z = alg.state(probe, "probe") if probe is not None else None
    E0 = energy(alg, X)
    H0 = helicity(alg, X)

    def _record(t, X, Z, flag=""):
        return TraceRecord(
            t=t,
            state=X.copy(),
            energy=energy(alg, X),
            helicity=helicity(alg, X),
            probe_linking=None if Z is None else linking(alg, X, Z),
            flag=flag,
        )

    records = [_record(0.0, X, Z)]
    n_full, remainder = _plan_steps(spec.dt, spec.t_end)
    total_steps = n_full + (1 if remainder > 0.0 else 0)
    result = IntegrationResult(records=records, steps=0)
    pending_flags: list = []

    for step in range(total_steps):
        t = step * spec.dt
        dt = spec.dt if step < n_full else remainder
        t_next = (step + 1) * spec.dt if step < n_full else spec.t_end
        try:
            if Z is None:
                X = rk4_step(alg, X, dt, t0=t)
            else:
                X, Z = _rk4_joint(alg, X, Z, dt, t0=t)
            if spec.method == "rk4-projected":
                try:
                    X = project_to_invariants(alg, X, E0, H0, spec.projection)
                except ProjectionError:
                    result.projection_failures += 1
                    pending_flags.append("projection-failed")
        except NumericalFailure as exc:
            result.failed = True
            result.failure_message = str(exc)
            records.append(_record(t, X, Z, flag="numerical-failure"))
            return result
        result.steps = step + 1
        is_last = step == total_steps - 1
        if (step + 1) % spec.record_every == 0 or is_last:
            flag = ",".join(pending_flags)
            pending_flags = []
            records.append(_record(t_next, X, Z, flag=flag))
    return result
