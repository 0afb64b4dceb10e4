"""Euler dynamics on a fluid algebra.

The evolution of a velocity state X is defined weakly by

    (dX/dt, Z) = {X, D X, Z}        for every Z,

so the right-hand side is ``G^-1 c`` with ``c_m = sum_ij T[i,j,m] X_i (DX)_j``.
Energy (X, X) and helicity (X, D X) are first integrals: pairing the RHS
with X or D X lands in the alternating form with a repeated argument.

The companion operators implemented here:

* ``vorticity_rhs`` -- evolution of Y = D X, paired as {D'Y, Y, D Z},
* ``transport``     -- infinitesimal transport, (T(X,Z), W) = {X, Z, D W},
* ``induced_bracket`` -- [X, Y] with <[X,Y], Z> = {X, Y, Z},
* ``jacobiator``    -- cyclic bracket sum; zero exactly when the algebra
  comes from a Lie algebra with invariant pairing,
* ``circulation_defect`` -- residual functional that vanishes only on the
  Euler right-hand side (the uniqueness characterization).

All functions are pure; they share the per-algebra matrix factorizations
cached on the ``FluidAlgebra`` value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FluidAlgebra, curl, inverse_curl

__all__ = [
    "RhsEvaluation",
    "euler_rhs",
    "euler_rhs_info",
    "vorticity_rhs",
    "transport",
    "induced_bracket",
    "jacobiator",
    "circulation_defect",
]


@dataclass
class RhsEvaluation:
    """One right-hand-side evaluation plus its operation counts."""

    value: np.ndarray
    solves: int
    contractions: int


def _finite(v: np.ndarray, label: str) -> np.ndarray:
    if not np.all(np.isfinite(v)):
        raise FloatingPointError(f"non-finite {label}")
    return v


def euler_rhs(alg: FluidAlgebra, X) -> np.ndarray:
    """Right-hand side of the Euler ODE: V with (V, Z) = {X, D X, Z}."""
    X = alg.state(X, "X")
    DX = curl(alg, X)
    c = alg.triple.contract_pair(X, DX)
    return _finite(alg.solve_metric(c), "Euler right-hand side")


def euler_rhs_info(alg: FluidAlgebra, X) -> RhsEvaluation:
    """As :func:`euler_rhs`, reporting solve/contraction counts."""
    return RhsEvaluation(value=euler_rhs(alg, X), solves=2, contractions=1)


def vorticity_rhs(alg: FluidAlgebra, Y) -> np.ndarray:
    """Evolution of a vorticity state: W with (W, Z) = {D'Y, Y, D Z}."""
    Y = alg.state(Y, "Y")
    X = inverse_curl(alg, Y)
    b = alg.triple.contract_pair(X, Y)
    # {X, Y, D Z} = b . (D Z) = (D^T b) . Z, and G^-1 D^T = G^-1 L G^-1,
    # which is curl applied after a metric solve.
    return _finite(curl(alg, alg.solve_metric(b)),
                   "vorticity right-hand side")


def transport(alg: FluidAlgebra, X, Z) -> np.ndarray:
    """Infinitesimal transport of Z by X: t with (t, W) = {X, Z, D W}."""
    X = alg.state(X, "X")
    Z = alg.state(Z, "Z")
    b = alg.triple.contract_pair(X, Z)
    return _finite(curl(alg, alg.solve_metric(b)), "transport value")


def induced_bracket(alg: FluidAlgebra, X, Y) -> np.ndarray:
    """Bracket [X, Y] defined through the linking form: <[X,Y], Z> = {X,Y,Z}."""
    X = alg.state(X, "X")
    Y = alg.state(Y, "Y")
    b = alg.triple.contract_pair(X, Y)
    return alg.solve_linking(b)


def jacobiator(alg: FluidAlgebra, X, Y, Z) -> np.ndarray:
    """Cyclic sum [[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y] of the induced bracket.

    Its norm is the Jacobi defect: identically zero on algebras built from
    a Lie algebra with invariant pairing, generically nonzero otherwise.
    """
    X = alg.state(X, "X")
    Y = alg.state(Y, "Y")
    Z = alg.state(Z, "Z")
    return (
        induced_bracket(alg, induced_bracket(alg, X, Y), Z)
        + induced_bracket(alg, induced_bracket(alg, Y, Z), X)
        + induced_bracket(alg, induced_bracket(alg, Z, X), Y)
    )


def circulation_defect(alg: FluidAlgebra, F, X) -> np.ndarray:
    """Residual functional separating F from the Euler right-hand side at X.

    Returns r with ``r . Z = (F, D Z) - {X, D X, D Z}`` for every Z; as a
    probe-linking balance this vanishes iff F is the Euler RHS, and since D
    is invertible the residual detects any perturbation of F.  Both pairings
    are deterministic, so at F = euler_rhs(X) the residual is exactly zero.
    """
    F = alg.state(F, "F")
    X = alg.state(X, "X")
    DX = curl(alg, X)
    c = alg.triple.contract_pair(X, DX)
    # (F, D Z) = (L F) . Z  since D^T G = L;  {X, DX, D Z} = (L G^-1 c) . Z
    return alg.linking @ F - alg.linking @ alg.solve_metric(c)
