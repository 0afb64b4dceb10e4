"""Constructors for concrete fluid algebras.

* :func:`from_lie_algebra` -- any Lie algebra with an invariant
  nondegenerate symmetric pairing yields a fluid algebra with
  ``{X, Y, Z} = P([X, Y], Z)``.
* :func:`so3` / :func:`rigid_body` -- the three-dimensional family where
  the triple form is the determinant and the Euler ODE reduces to
  ``G dX/dt = X x (G^-1 X)`` (free rigid body in disguise).
* :func:`build_torus_algebra` -- spectral Galerkin truncation of the
  divergence-free, mean-zero velocity fields on the unit flat 3-torus,
  cut off at max-norm wavenumber K.
* :func:`random_algebra` -- seeded random algebras for property testing.

Sign convention: the determinant orientation fixes the overall sign of the
triple form for the Lie and torus families; flipping it globally reverses
time in the Euler ODE and nothing else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AlgebraFormatError,
    AlgebraValidationError,
    FluidAlgebra,
    TripleForm,
    make_rng,
    validate,
)

__all__ = [
    "LieAlgebraInput",
    "from_lie_algebra",
    "so3",
    "rigid_body",
    "TorusMode",
    "TorusBasis",
    "TorusSizeError",
    "build_torus_algebra",
    "beltrami_state",
    "GenerationError",
    "random_algebra",
    "LEVI_CIVITA",
]

# Minimum |eigenvalue| accepted for a random linking form, and the retry
# budget before giving up (practically unreachable for n <= 64).
_RANDOM_LINKING_MIN_EIG = 0.1
_RANDOM_LINKING_RETRIES = 16


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for perm in itertools.permutations(range(3)):
        inversions = sum(
            1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b]
        )
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


LEVI_CIVITA = _levi_civita()
LEVI_CIVITA.setflags(write=False)


# ---------------------------------------------------------------------------
# Lie-algebra instances


@dataclass
class LieAlgebraInput:
    """A Lie algebra with an invariant pairing and a free metric choice.

    ``structure_constants[i, j, k]`` gives [e_i, e_j] = sum_k c[i,j,k] e_k.
    ``pairing`` must be symmetric, nondegenerate, and invariant:
    P([X, Y], Z) + P(Y, [X, Z]) = 0 on all basis triples.
    ``metric`` is any symmetric positive definite matrix.
    """

    structure_constants: np.ndarray
    pairing: np.ndarray
    metric: np.ndarray

    def __post_init__(self):
        self.structure_constants = np.asarray(self.structure_constants, float)
        self.pairing = np.asarray(self.pairing, float)
        self.metric = np.asarray(self.metric, float)

    @property
    def dim(self) -> int:
        return self.structure_constants.shape[0]


def from_lie_algebra(spec: LieAlgebraInput, tol: float = 1e-10,
                     meta=None) -> FluidAlgebra:
    """Build the fluid algebra {X,Y,Z} = P([X,Y], Z), <,> = P, metric free.

    The pairing invariance is validated (not assumed); a violation beyond
    ``tol`` times the natural scale is rejected reporting the worst basis
    triple.  Full antisymmetry of the resulting tensor is then validated
    through the ordinary algebra validation.
    """
    c = spec.structure_constants
    P = spec.pairing
    n = spec.dim
    if c.shape != (n, n, n):
        raise AlgebraFormatError(
            f"structure constants must be ({n},{n},{n}), got {c.shape}"
        )
    scale = max(float(np.max(np.abs(c))) * max(float(np.max(np.abs(P))), 1.0),
                1.0)
    anti = float(np.max(np.abs(c + c.transpose(1, 0, 2))))
    if anti > tol * scale:
        raise AlgebraValidationError(
            f"structure constants not antisymmetric in (i, j): "
            f"defect {anti:.3e}"
        )
    sym = float(np.max(np.abs(P - P.T)))
    if sym > tol * scale:
        raise AlgebraValidationError(
            f"pairing not symmetric: defect {sym:.3e}"
        )
    # invariance: P([e_i,e_j], e_k) + P(e_j, [e_i,e_k]) = 0
    inv = np.einsum("ijm,mk->ijk", c, P) + np.einsum("ikm,jm->ijk", c, P)
    worst = float(np.max(np.abs(inv)))
    if worst > tol * scale:
        i, j, k = np.unravel_index(np.argmax(np.abs(inv)), inv.shape)
        raise AlgebraValidationError(
            f"pairing is not invariant: worst basis triple "
            f"({i}, {j}, {k}) with defect {worst:.3e}"
        )
    T = np.einsum("ijm,mk->ijk", c, P)
    base_meta = {"kind": "lie"}
    if meta:
        base_meta.update(meta)
    alg = FluidAlgebra(n, T, P, spec.metric, meta=base_meta)
    validate(alg).require()
    return alg


def so3(metric=None) -> FluidAlgebra:
    """The so(3) instance: determinant triple form, identity pairing.

    The induced bracket is the vector cross product.  An optional metric
    turns this into the rigid-body family.
    """
    if metric is None:
        metric = np.eye(3)
    return from_lie_algebra(
        LieAlgebraInput(LEVI_CIVITA, np.eye(3), metric),
        meta={"name": "so3"},
    )


def rigid_body(i1: float, i2: float, i3: float) -> FluidAlgebra:
    """Rigid-body family: n = 3, determinant triple form, L = I,
    G = diag(i1, i2, i3) with positive moments.

    The Euler ODE becomes G dX/dt = X x (G^-1 X).
    """
    moments = (float(i1), float(i2), float(i3))
    if min(moments) <= 0:
        raise ValueError(f"moments must be positive, got {moments}")
    alg = from_lie_algebra(
        LieAlgebraInput(LEVI_CIVITA, np.eye(3), np.diag(moments)),
        meta={"name": "rigid-body", "moments": moments},
    )
    return alg


# ---------------------------------------------------------------------------
# spectral flat-torus instance


class TorusSizeError(ValueError):
    """Requested truncation exceeds the configured dimension cap."""


@dataclass(frozen=True)
class TorusMode:
    """One real basis field sqrt(2) * trig(2 pi k.x) * e_a(k)."""

    k: tuple  # integer wavevector, lexicographically positive representative
    polarization: int  # 1 or 2
    phase: str  # "cos" or "sin"


@dataclass
class TorusBasis:
    """Metadata mapping torus algebra coordinates to Fourier modes.

    The basis covers one representative per +-k pair for all
    0 < |k|_inf <= K, with two polarizations orthogonal to k and two
    phases, on the unit-volume torus (x in [0,1)^3, wavevectors 2 pi k).
    Per representative the four coordinates are ordered
    (pol 1, cos), (pol 1, sin), (pol 2, cos), (pol 2, sin).
    """

    K: int
    reps: np.ndarray  # (m, 3) integer half-lattice representatives
    e1: np.ndarray  # (m, 3) first polarization vectors
    e2: np.ndarray  # (m, 3) second polarization vectors
    modes: list = field(default_factory=list)  # 4m TorusMode records

    @property
    def dim(self) -> int:
        return 4 * self.reps.shape[0]

    def mode(self, p: int) -> TorusMode:
        return self.modes[p]

    def polarization_vector(self, rep_index: int, a: int) -> np.ndarray:
        return self.e1[rep_index] if a == 1 else self.e2[rep_index]

    def field_at(self, p: int, points: np.ndarray) -> np.ndarray:
        """Evaluate basis field p at Cartesian points of shape (..., 3)."""
        mode = self.modes[p]
        rep_index = p // 4
        e = self.polarization_vector(rep_index, mode.polarization)
        phase = 2.0 * np.pi * (np.asarray(points) @ np.asarray(mode.k, float))
        trig = np.cos(phase) if mode.phase == "cos" else np.sin(phase)
        return np.sqrt(2.0) * trig[..., None] * e

    def analytic_curl_eigenvalues(self) -> np.ndarray:
        """Sorted curl eigenvalues: +-2 pi |k| twice per representative."""
        out = []
        for k in self.reps:
            lam = 2.0 * np.pi * float(np.linalg.norm(k))
            out.extend([lam, lam, -lam, -lam])
        return np.sort(np.array(out))


def _half_lattice(K: int):
    """Lexicographically positive integer wavevectors with |k|_inf <= K."""
    reps = []
    for k in itertools.product(range(-K, K + 1), repeat=3):
        if k == (0, 0, 0):
            continue
        for comp in k:
            if comp > 0:
                reps.append(k)
                break
            if comp < 0:
                break
    return sorted(reps)


def _frame(k: np.ndarray):
    """Orthonormal polarization pair: e1 = unit(k x u), e2 = unit(k) x e1.

    u is the first standard basis vector not parallel to k; the pair
    (e1, e2, k/|k|) is right-handed.
    """
    kf = np.asarray(k, float)
    u = np.zeros(3)
    u[1 if (k[1] == 0 and k[2] == 0) else 0] = 1.0
    e1 = np.cross(kf, u)
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(kf / np.linalg.norm(kf), e1)
    return e1, e2


# index of the (polarization, phase) slot within a representative's block
_LOCAL_ORDER = [(1, "cos"), (1, "sin"), (2, "cos"), (2, "sin")]
_LOCAL_PHASE = np.array([0, 1, 0, 1])  # 1 = sin
_LOCAL_POL = np.array([1, 1, 2, 2])

# polarization dets below this are geometric round-off of an exact zero
_DET_NOISE = 1e-14


def _trig_integral(phases, signs) -> float:
    """Integral over the unit torus of a product of three trig factors.

    ``signs`` is the sign vector with sum_j signs[j] * k_j = 0.  Products
    with an odd number of sine factors integrate to zero; with none the
    value is 1/4, and with two it is -s_a s_b / 4 for the two sine slots.
    """
    sin_slots = [j for j, ph in enumerate(phases) if ph == 1]
    if len(sin_slots) % 2 == 1:
        return 0.0
    if not sin_slots:
        return 0.25
    a, b = sin_slots
    return -0.25 * signs[a] * signs[b]


def _resolve_signs(k1, k2, k3):
    """Find the sign triple (1, s2, s3) with k1 + s2 k2 + s3 k3 = 0."""
    for s2, s3 in ((1, -1), (-1, 1), (-1, -1)):
        if all(k1[m] + s2 * k2[m] + s3 * k3[m] == 0 for m in range(3)):
            return (1, s2, s3)
    return None


def build_torus_algebra(K: int, max_dim: int = 512):
    """Galerkin truncation of the torus fluid algebra at |k|_inf <= K.

    Returns ``(algebra, basis)``.  The basis is L2-orthonormal so the
    metric is the identity; the linking form couples the cos/sin pair
    within each mode with weight 2 pi |k| (curl eigenvalues +-2 pi |k|);
    the triple tensor is assembled in closed form from the selection rule
    k1 +- k2 +- k3 = 0 and products of trigonometric integrals, stored as
    canonical sparse entries sorted by (i, j, k).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    reps = _half_lattice(K)
    m = len(reps)
    dim = 4 * m
    if dim > max_dim:
        raise TorusSizeError(
            f"torus truncation K={K} has dimension {dim}, above the cap "
            f"{max_dim}; raise max_dim to build it anyway"
        )
    rep_arr = np.array(reps, dtype=int)
    rep_index = {k: idx for idx, k in enumerate(reps)}
    e1 = np.zeros((m, 3))
    e2 = np.zeros((m, 3))
    for r, k in enumerate(reps):
        e1[r], e2[r] = _frame(np.array(k))

    modes = [
        TorusMode(k, pol, phase)
        for k in reps
        for (pol, phase) in _LOCAL_ORDER
    ]
    basis = TorusBasis(K=K, reps=rep_arr, e1=e1, e2=e2, modes=modes)

    # linking form: within mode k, in local order (c1, s1, c2, s2),
    # curl(c1) = -lam s2, curl(c2) = +lam s1, and symmetrically.
    L = np.zeros((dim, dim))
    for r, k in enumerate(reps):
        lam = 2.0 * np.pi * float(np.linalg.norm(k))
        base = 4 * r
        c1, s1, c2, s2 = base, base + 1, base + 2, base + 3
        L[s2, c1] = L[c1, s2] = -lam
        L[s1, c2] = L[c2, s1] = lam

    # triple tensor: iterate multisets r1 <= r2 <= r3 of representatives
    # whose wavevectors admit a signed zero sum; each admits exactly one
    # sign solution up to global flip.
    pol_vecs = {}  # (rep, a) -> vector
    for r in range(m):
        pol_vecs[(r, 1)] = e1[r]
        pol_vecs[(r, 2)] = e2[r]

    index_rows = []
    value_rows = []
    amplitude = 2.0 * np.sqrt(2.0)  # (sqrt 2)^3 from the field normalization
    for r1 in range(m):
        k1 = reps[r1]
        for r2 in range(r1, m):
            k2 = reps[r2]
            candidates = set()
            for s in (1, -1):
                c = tuple(k1[mm] + s * k2[mm] for mm in range(3))
                if c == (0, 0, 0):
                    continue
                if max(abs(x) for x in c) > K:
                    continue
                if c not in rep_index:
                    c = tuple(-x for x in c)
                candidates.add(rep_index[c])
            for r3 in sorted(candidates):
                if r3 < r2:
                    continue
                k3 = reps[r3]
                signs = _resolve_signs(k1, k2, k3)
                if signs is None:
                    continue
                for l1 in range(4):
                    l2_start = l1 + 1 if r1 == r2 else 0
                    for l2 in range(l2_start, 4):
                        l3_start = l2 + 1 if r2 == r3 else 0
                        for l3 in range(l3_start, 4):
                            phases = (
                                _LOCAL_PHASE[l1],
                                _LOCAL_PHASE[l2],
                                _LOCAL_PHASE[l3],
                            )
                            tri = _trig_integral(phases, signs)
                            if tri == 0.0:
                                continue
                            det = float(
                                np.linalg.det(
                                    np.column_stack(
                                        (
                                            pol_vecs[(r1, _LOCAL_POL[l1])],
                                            pol_vecs[(r2, _LOCAL_POL[l2])],
                                            pol_vecs[(r3, _LOCAL_POL[l3])],
                                        )
                                    )
                                )
                            )
                            if abs(det) <= _DET_NOISE:
                                continue
                            index_rows.append(
                                (4 * r1 + l1, 4 * r2 + l2, 4 * r3 + l3)
                            )
                            value_rows.append(amplitude * det * tri)

    tf = TripleForm(
        dim,
        np.array(index_rows, dtype=np.intp).reshape(-1, 3),
        np.array(value_rows, dtype=float),
    )
    if dim <= 64:
        tf = TripleForm(dim, tf.index, tf.values, dense=tf.to_dense())
    alg = FluidAlgebra(
        dim, tf, L, np.eye(dim), meta={"kind": "torus", "K": K}
    )
    validate(alg).require()
    return alg, basis


def beltrami_state(basis: TorusBasis) -> np.ndarray:
    """Curl eigenfield with eigenvalue +2 pi built on the |k| = 1 shell.

    Combines the eigenvector (cos e2 + sin e1)/sqrt(2) of each unit
    wavevector (the ABC-flow pattern), normalized to unit energy.  Being a
    curl eigenvector it is a steady state of the Euler ODE.
    """
    X = np.zeros(basis.dim)
    hit = False
    for r, k in enumerate(basis.reps):
        if int(k @ k) != 1:
            continue
        hit = True
        base = 4 * r
        # local order (c1, s1, c2, s2); +2pi eigenvectors are c2+s1 and c1-s2
        X[base + 1] += 1.0  # s1
        X[base + 2] += 1.0  # c2
    if not hit:
        raise ValueError("basis has no |k| = 1 shell")
    return X / np.linalg.norm(X)


# ---------------------------------------------------------------------------
# seeded random algebras


class GenerationError(RuntimeError):
    """Random generation exhausted its retry budget."""


def _antisymmetrize(A: np.ndarray) -> np.ndarray:
    """Full antisymmetrization: signed permutation sum over the 6 orders / 6."""
    return (
        A
        + A.transpose(1, 2, 0)
        + A.transpose(2, 0, 1)
        - A.transpose(1, 0, 2)
        - A.transpose(0, 2, 1)
        - A.transpose(2, 1, 0)
    ) / 6.0


def random_algebra(seed: int, n: int) -> FluidAlgebra:
    """Deterministic random fluid algebra, a pure function of (seed, n).

    * triple tensor: full antisymmetrization of an (n, n, n) array of
      standard normals (identically zero for n < 3),
    * metric: A^T A + n I for standard-normal A (comfortably posdef),
    * linking: (B + B^T)/2 for standard-normal B, resampled from a freshly
      spawned seed until min |eigenvalue| >= 0.1 (bounded retries).

    Draws come from PCG64 seeded via SeedSequence(seed); retries use
    spawned child sequences, so the output never depends on how many
    retries earlier shapes consumed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ss = np.random.SeedSequence(seed)
    rng = make_rng(ss)
    T = _antisymmetrize(rng.standard_normal((n, n, n)))
    A = rng.standard_normal((n, n))
    G = A.T @ A + n * np.eye(n)
    L = None
    for child in ss.spawn(_RANDOM_LINKING_RETRIES):
        B = make_rng(child).standard_normal((n, n))
        candidate = (B + B.T) / 2.0
        if np.min(np.abs(np.linalg.eigvalsh(candidate))) >= _RANDOM_LINKING_MIN_EIG:
            L = candidate
            break
    if L is None:
        raise GenerationError(
            f"no acceptable linking form in {_RANDOM_LINKING_RETRIES} "
            f"retries (seed={seed}, n={n})"
        )
    return FluidAlgebra(
        n, T, L, G, meta={"kind": "random", "seed": int(seed), "n": int(n)}
    )
