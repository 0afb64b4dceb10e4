"""Core data model for finite-dimensional fluid algebras.

A fluid algebra on R^n is the triple (T, L, G):

* ``T`` -- a fully antisymmetric rank-3 tensor realizing the alternating
  trilinear form ``{X, Y, Z} = sum_ijk T[i,j,k] X_i Y_j Z_k``,
* ``L`` -- a symmetric nondegenerate matrix realizing the bilinear
  linking form ``<X, Y> = X^T L Y``,
* ``G`` -- a symmetric positive definite matrix realizing the metric
  inner product ``(X, Y) = X^T G Y``.

The curl operator ``D`` is the unique operator with ``(D X, Y) = <X, Y>``,
i.e. ``D = G^-1 L``; it is self-adjoint for the metric because ``L`` is
symmetric.  Energy is ``(X, X)`` and helicity is ``(X, D X) = X^T L X``.

All arrays are float64 and are frozen (non-writeable) once an algebra is
constructed, so algebra values are immutable and safely shareable between
threads.  Evaluation is sequential with a fixed ascending-index summation
order, which makes every operation bit-reproducible on a given platform.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

__all__ = [
    "AlgebraFormatError",
    "AlgebraDataError",
    "AlgebraValidationError",
    "ConditioningWarning",
    "TripleForm",
    "FluidAlgebra",
    "ValidationReport",
    "CheckResult",
    "validate",
    "triple",
    "linking",
    "metric_inner",
    "energy",
    "helicity",
    "curl",
    "inverse_curl",
    "g_norm",
    "g_dual_norm",
    "make_rng",
    "save_algebra",
    "load_algebra",
    "DENSE_DIM_LIMIT",
]

# Dense rank-3 storage up to this dimension; canonical sparse entries above.
DENSE_DIM_LIMIT = 64

# Nondegeneracy thresholds for validation (relative to the largest
# singular value / eigenvalue).  Chosen so that curl solves remain
# trustworthy at double precision.
LINKING_SV_RATIO = 1e-8
METRIC_EIG_RATIO = 1e-10

# Above this condition number of L, inverse_curl and induced_bracket emit a
# ConditioningWarning (validation itself fails only at LINKING_SV_RATIO).
CONDITION_WARN_THRESHOLD = 1e6


class AlgebraFormatError(ValueError):
    """Structural problem: wrong shapes, bad sparse entries, bad file schema."""


class AlgebraDataError(ValueError):
    """Non-finite entries in algebra data."""


class AlgebraValidationError(ValueError):
    """A validated invariant of the algebra does not hold."""


class ConditioningWarning(UserWarning):
    """The linking form is ill-conditioned; solves against it lose accuracy."""


def make_rng(seed) -> np.random.Generator:
    """Project-wide deterministic generator: PCG64 (O'Neill's PCG XSL RR 128/64).

    Every seeded feature of the package draws from this generator, so
    fixtures are bit-identical across platforms.  ``seed`` may be an int or
    a ``numpy.random.SeedSequence``.
    """
    return np.random.Generator(np.random.PCG64(seed))


def _as_state(dim: int, X, name: str = "state") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != (dim,):
        raise AlgebraFormatError(
            f"{name} has shape {X.shape}, expected ({dim},)"
        )
    return X


class TripleForm:
    """Fully antisymmetric rank-3 form with canonical sparse entries.

    The canonical representation is the list of entries ``(i, j, k, value)``
    with ``i < j < k``; the other five index orders are implied by full
    antisymmetry.  For dimensions up to ``DENSE_DIM_LIMIT`` a dense array is
    kept alongside and used for pair contractions (the integrator hot path).

    Evaluation through the canonical entries is grouped as a cofactor
    expansion along the first argument, which makes ``__call__`` *exactly*
    antisymmetric under swapping the last two arguments and exactly zero
    whenever two arguments are equal.
    """

    def __init__(self, dim: int, index, values, dense=None):
        self.dim = int(dim)
        index = np.asarray(index, dtype=np.intp).reshape(-1, 3)
        values = np.asarray(values, dtype=float).reshape(-1)
        if index.shape[0] != values.shape[0]:
            raise AlgebraFormatError("sparse index/value length mismatch")
        if index.size:
            if index.min() < 0 or index.max() >= self.dim:
                raise AlgebraFormatError("sparse entry index out of range")
            i, j, k = index.T
            if not (np.all(i < j) and np.all(j < k)):
                raise AlgebraFormatError(
                    "sparse entries must satisfy i < j < k"
                )
        if not np.all(np.isfinite(values)):
            raise AlgebraDataError("non-finite value in sparse entries")
        order = np.lexsort((index[:, 2], index[:, 1], index[:, 0]))
        index = index[order]
        values = values[order]
        if index.shape[0] > 1:
            same = np.all(index[1:] == index[:-1], axis=1)
            if same.any():
                raise AlgebraFormatError("duplicate sparse entry")
        self.index = index
        self.values = values
        self.index.setflags(write=False)
        self.values.setflags(write=False)
        if dense is not None:
            dense = np.ascontiguousarray(dense, dtype=float)
            dense.setflags(write=False)
        self.dense = dense

    # -- constructors -------------------------------------------------

    @classmethod
    def from_dense(cls, array) -> "TripleForm":
        """Build from a dense (n, n, n) array; entries are read at i < j < k."""
        array = np.asarray(array, dtype=float)
        if array.ndim != 3 or len(set(array.shape)) != 1:
            raise AlgebraFormatError(
                f"triple tensor must be cubic rank 3, got shape {array.shape}"
            )
        if not np.all(np.isfinite(array)):
            raise AlgebraDataError("non-finite value in triple tensor")
        n = array.shape[0]
        ii, jj, kk = np.meshgrid(
            np.arange(n), np.arange(n), np.arange(n), indexing="ij"
        )
        mask = (ii < jj) & (jj < kk) & (array != 0.0)
        index = np.stack([ii[mask], jj[mask], kk[mask]], axis=1)
        dense = array if n <= DENSE_DIM_LIMIT else None
        return cls(n, index, array[mask], dense=dense)

    @classmethod
    def from_entries(cls, dim: int, entries) -> "TripleForm":
        """Build from canonical ``(i, j, k, value)`` rows with i < j < k."""
        index = []
        values = []
        for row in entries:
            if len(row) != 4:
                raise AlgebraFormatError(f"bad sparse entry {row!r}")
            i, j, k, v = row
            index.append((int(i), int(j), int(k)))
            values.append(float(v))
        form = cls(dim, np.array(index, dtype=np.intp).reshape(-1, 3),
                   np.array(values, dtype=float))
        if dim <= DENSE_DIM_LIMIT:
            form = cls(dim, form.index, form.values, dense=form.to_dense())
        return form

    # -- queries ------------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def max_abs(self) -> float:
        if self.dense is not None and self.dense.size:
            return float(np.max(np.abs(self.dense)))
        if self.values.size:
            return float(np.max(np.abs(self.values)))
        return 0.0

    def entry_list(self):
        """Canonical entries as a list of (i, j, k, value) tuples."""
        return [
            (int(i), int(j), int(k), float(v))
            for (i, j, k), v in zip(self.index, self.values)
        ]

    def to_dense(self) -> np.ndarray:
        if self.dense is not None:
            return self.dense
        out = np.zeros((self.dim,) * 3)
        for (i, j, k), v in zip(self.index, self.values):
            out[i, j, k] = out[j, k, i] = out[k, i, j] = v
            out[j, i, k] = out[i, k, j] = out[k, j, i] = -v
        return out

    # -- evaluation ---------------------------------------------------

    def __call__(self, X, Y, Z) -> float:
        """Evaluate {X, Y, Z} through the canonical entries.

        Returns exactly 0.0 when two arguments are equal, and exactly
        negates when the last two arguments are swapped.
        """
        if (
            np.array_equal(X, Y)
            or np.array_equal(Y, Z)
            or np.array_equal(X, Z)
        ):
            return 0.0
        if not self.values.size:
            return 0.0
        i, j, k = self.index.T
        minors = (
            X[i] * (Y[j] * Z[k] - Y[k] * Z[j])
            + X[j] * (Y[k] * Z[i] - Y[i] * Z[k])
            + X[k] * (Y[i] * Z[j] - Y[j] * Z[i])
        )
        return float(np.sum(self.values * minors))

    def contract_pair(self, X, Y) -> np.ndarray:
        """Return b with ``b[m] = sum_ij T[i,j,m] X_i Y_j``.

        Uses the dense array when available (fixed ascending-index einsum),
        otherwise accumulates over the canonical entries in sorted order.
        """
        if self.dense is not None:
            return np.einsum("ijm,i,j->m", self.dense, X, Y, optimize=False)
        out = np.zeros(self.dim)
        if not self.values.size:
            return out
        i, j, k = self.index.T
        v = self.values
        np.add.at(out, k, v * (X[i] * Y[j] - X[j] * Y[i]))
        np.add.at(out, i, v * (X[j] * Y[k] - X[k] * Y[j]))
        np.add.at(out, j, v * (X[k] * Y[i] - X[i] * Y[k]))
        return out


class FluidAlgebra:
    """Immutable value bundling the three forms on an n-dimensional space.

    Parameters
    ----------
    triple : TripleForm, dense (n, n, n) array, or iterable of (i, j, k, v)
    linking : (n, n) array, symmetric nondegenerate
    metric : (n, n) array, symmetric positive definite
    meta : optional dict of provenance tags (instance name, seeds, ...)

    Construction performs structural checks only (shapes, finiteness); the
    mathematical invariants are checked by :func:`validate`.
    """

    def __init__(self, dim: int, triple, linking, metric, meta=None):
        self.dim = int(dim)
        if self.dim < 1:
            raise AlgebraFormatError("dim must be a positive integer")
        if isinstance(triple, TripleForm):
            tf = triple
        elif isinstance(triple, np.ndarray) and triple.ndim == 3:
            tf = TripleForm.from_dense(triple)
        else:
            tf = TripleForm.from_entries(self.dim, triple)
        if tf.dim != self.dim:
            raise AlgebraFormatError(
                f"triple form dimension {tf.dim} != algebra dim {self.dim}"
            )
        self.triple = tf
        self.linking = self._square(linking, "linking")
        self.metric = self._square(metric, "metric")
        self.meta = dict(meta) if meta else {}
        self._conditioning_warned = False

    def _square(self, M, name: str) -> np.ndarray:
        M = np.ascontiguousarray(M, dtype=float)
        if M.shape != (self.dim, self.dim):
            raise AlgebraFormatError(
                f"{name} matrix has shape {M.shape}, expected "
                f"({self.dim}, {self.dim})"
            )
        if not np.all(np.isfinite(M)):
            raise AlgebraDataError(f"non-finite value in {name} matrix")
        M.setflags(write=False)
        return M

    # Factorizations are computed once per algebra and reused; curl sits in
    # the inner loop of every right-hand-side evaluation.

    @cached_property
    def _metric_factor(self):
        try:
            return scipy.linalg.cho_factor(self.metric, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise AlgebraValidationError(
                "metric is not positive definite (Cholesky failed); "
                "run validate() for details"
            ) from exc

    @cached_property
    def _linking_factor(self):
        return scipy.linalg.lu_factor(self.linking)

    # solves skip scipy's finiteness scan: matrices were checked at
    # construction, and right-hand sides are checked by the callers that
    # need the guarantee (non-finite inputs propagate as non-finite output)

    @cached_property
    def _linking_singular_values(self) -> np.ndarray:
        return scipy.linalg.svdvals(self.linking)

    @cached_property
    def _metric_eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.metric)

    @property
    def linking_condition(self) -> float:
        sv = self._linking_singular_values
        if sv[-1] == 0.0:
            return np.inf
        return float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf

    @property
    def metric_condition(self) -> float:
        ev = self._metric_eigenvalues
        if ev[0] <= 0:
            return np.inf
        return float(ev[-1] / ev[0])

    def solve_metric(self, rhs: np.ndarray) -> np.ndarray:
        """Solve G x = rhs with the cached Cholesky factor."""
        return scipy.linalg.cho_solve(
            self._metric_factor, rhs, check_finite=False
        )

    def solve_linking(self, rhs: np.ndarray) -> np.ndarray:
        """Solve L x = rhs with the cached LU factor, warning once if L is
        ill-conditioned."""
        self._warn_if_ill_conditioned()
        return scipy.linalg.lu_solve(
            self._linking_factor, rhs, check_finite=False
        )

    def _warn_if_ill_conditioned(self):
        if self._conditioning_warned:
            return
        cond = self.linking_condition
        if cond > CONDITION_WARN_THRESHOLD:
            self._conditioning_warned = True
            warnings.warn(
                f"linking form condition number ~{cond:.3e}; solves against "
                "it lose roughly that many digits",
                ConditioningWarning,
                stacklevel=3,
            )

    def state(self, X, name: str = "state") -> np.ndarray:
        return _as_state(self.dim, X, name)

    def __repr__(self):
        tag = self.meta.get("kind", "custom")
        return (
            f"FluidAlgebra(dim={self.dim}, nnz={self.triple.nnz}, "
            f"kind={tag!r})"
        )


# ---------------------------------------------------------------------------
# validation


@dataclass
class CheckResult:
    name: str
    defect: float
    threshold: float
    passed: bool


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    antisymmetry_defect: float = 0.0
    linking_symmetry_defect: float = 0.0
    linking_singular_values: tuple = (0.0, 0.0)  # (min, max)
    metric_eigenvalues: tuple = (0.0, 0.0)  # (min, max)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def require(self):
        if not self.passed:
            names = ", ".join(
                f"{c.name} (defect {c.defect:.3e} > {c.threshold:.3e})"
                for c in self.failures()
            )
            raise AlgebraValidationError(f"algebra validation failed: {names}")
        return self

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "defect": c.defect,
                    "threshold": c.threshold,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def validate(alg: FluidAlgebra, tol: float = 1e-12) -> ValidationReport:
    """Check the three structural invariants, returning measured defects.

    * full antisymmetry of the triple tensor (entrywise, against the dense
      array when one is stored; the canonical sparse layout is antisymmetric
      by construction),
    * symmetry and nondegeneracy of the linking form (minimum singular
      value at least ``1e-8`` of the maximum),
    * symmetry and positive definiteness of the metric (minimum eigenvalue
      at least ``1e-10`` of the maximum).

    ``tol`` scales the antisymmetry/symmetry defect thresholds; the
    nondegeneracy ratios are fixed so that curl solves stay trustworthy at
    double precision.
    """
    report = ValidationReport()

    tf = alg.triple
    t_scale = max(tf.max_abs(), 1.0)
    if tf.dense is not None:
        # defect = entrywise distance to the full antisymmetrization, which
        # is zero exactly when the tensor is fully antisymmetric
        T = tf.dense
        antisym = (
            T
            + T.transpose(1, 2, 0)
            + T.transpose(2, 0, 1)
            - T.transpose(1, 0, 2)
            - T.transpose(0, 2, 1)
            - T.transpose(2, 1, 0)
        ) / 6.0
        defect = float(np.max(np.abs(T - antisym))) if T.size else 0.0
    else:
        # canonical i < j < k entries cannot violate antisymmetry
        defect = 0.0
    report.antisymmetry_defect = defect
    report.checks.append(
        CheckResult("triple-antisymmetry", defect, tol * t_scale,
                    defect <= tol * t_scale)
    )

    L = alg.linking
    l_scale = max(float(np.max(np.abs(L))), 1.0)
    sym_defect = float(np.max(np.abs(L - L.T)))
    report.linking_symmetry_defect = sym_defect
    report.checks.append(
        CheckResult("linking-symmetry", sym_defect, tol * l_scale,
                    sym_defect <= tol * l_scale)
    )
    sv = alg._linking_singular_values
    report.linking_singular_values = (float(sv[-1]), float(sv[0]))
    threshold = LINKING_SV_RATIO * float(sv[0])
    report.checks.append(
        CheckResult("linking-nondegenerate", float(sv[-1]), threshold,
                    bool(sv[-1] >= threshold) and sv[0] > 0)
    )

    G = alg.metric
    g_scale = max(float(np.max(np.abs(G))), 1.0)
    g_sym = float(np.max(np.abs(G - G.T)))
    report.checks.append(
        CheckResult("metric-symmetry", g_sym, tol * g_scale,
                    g_sym <= tol * g_scale)
    )
    ev = alg._metric_eigenvalues
    report.metric_eigenvalues = (float(ev[0]), float(ev[-1]))
    g_threshold = METRIC_EIG_RATIO * float(ev[-1])
    report.checks.append(
        CheckResult("metric-positive-definite", float(ev[0]), g_threshold,
                    bool(ev[0] > 0.0) and bool(ev[0] >= g_threshold))
    )
    return report


# ---------------------------------------------------------------------------
# the three forms and the curl pair


def triple(alg: FluidAlgebra, X, Y, Z) -> float:
    """Evaluate the alternating form {X, Y, Z}."""
    X = alg.state(X, "X")
    Y = alg.state(Y, "Y")
    Z = alg.state(Z, "Z")
    return alg.triple(X, Y, Z)


def linking(alg: FluidAlgebra, X, Y) -> float:
    """Evaluate the linking form <X, Y> = X^T L Y."""
    X = alg.state(X, "X")
    Y = alg.state(Y, "Y")
    return float(X @ (alg.linking @ Y))


def metric_inner(alg: FluidAlgebra, X, Y) -> float:
    """Evaluate the metric inner product (X, Y) = X^T G Y."""
    X = alg.state(X, "X")
    Y = alg.state(Y, "Y")
    return float(X @ (alg.metric @ Y))


def energy(alg: FluidAlgebra, X) -> float:
    """(X, X); nonnegative, zero only at X = 0."""
    return metric_inner(alg, X, X)


def helicity(alg: FluidAlgebra, X) -> float:
    """(X, D X) = X^T L X; the two expressions agree to round-off."""
    X = alg.state(X, "X")
    return float(X @ (alg.linking @ X))


def curl(alg: FluidAlgebra, X) -> np.ndarray:
    """Apply the curl operator D = G^-1 L, defined by (D X, Y) = <X, Y>."""
    X = alg.state(X, "X")
    return alg.solve_metric(alg.linking @ X)


def inverse_curl(alg: FluidAlgebra, Y) -> np.ndarray:
    """Apply D' = L^-1 G, the inverse of the curl operator."""
    Y = alg.state(Y, "Y")
    return alg.solve_linking(alg.metric @ Y)


def g_norm(alg: FluidAlgebra, v) -> float:
    """Metric norm sqrt(v^T G v) of a state vector."""
    v = alg.state(v, "v")
    return float(np.sqrt(max(v @ (alg.metric @ v), 0.0)))


def g_dual_norm(alg: FluidAlgebra, r) -> float:
    """Dual metric norm sqrt(r^T G^-1 r) of a linear functional."""
    r = alg.state(r, "r")
    return float(np.sqrt(max(r @ alg.solve_metric(r), 0.0)))


# ---------------------------------------------------------------------------
# file format: JSON with keys dim, triple, linking, metric (in that order)


def save_algebra(alg: FluidAlgebra, path) -> None:
    """Write the algebra as JSON.

    Keys are emitted in the order ``dim``, ``triple``, ``linking``,
    ``metric``; the triple is the canonical sparse list ``[i, j, k, value]``
    with ``i < j < k`` (zero-based), matrices are row-major nested lists.
    """
    payload = {
        "dim": alg.dim,
        "triple": [[i, j, k, v] for i, j, k, v in alg.triple.entry_list()],
        "linking": alg.linking.tolist(),
        "metric": alg.metric.tolist(),
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_algebra(path, tol: float = 1e-12, require_valid: bool = True) -> FluidAlgebra:
    """Load an algebra from the JSON format written by :func:`save_algebra`.

    Entries violating ``i < j < k`` are rejected.  With ``require_valid``
    the full invariant validation runs and failures raise
    :class:`AlgebraValidationError`.
    """
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AlgebraFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise AlgebraFormatError("top-level JSON value must be an object")
    missing = {"dim", "triple", "linking", "metric"} - set(payload)
    if missing:
        raise AlgebraFormatError(f"missing keys: {sorted(missing)}")
    dim = payload["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise AlgebraFormatError("dim must be a positive integer")
    for row in payload["triple"]:
        if not (isinstance(row, list) and len(row) == 4):
            raise AlgebraFormatError(f"bad triple entry {row!r}")
        i, j, k = row[:3]
        if not (i < j < k):
            raise AlgebraFormatError(
                f"triple entry {row!r} violates i < j < k"
            )
    alg = FluidAlgebra(
        dim,
        payload["triple"],
        np.asarray(payload["linking"], dtype=float),
        np.asarray(payload["metric"], dtype=float),
        meta={"kind": "custom", "path": str(path)},
    )
    if require_valid:
        validate(alg, tol=tol).require()
    return alg
