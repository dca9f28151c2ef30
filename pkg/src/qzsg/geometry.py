"""Regularizer geometry over the set of density matrices.

Two distance-generating functions are supported: the negative von Neumann
entropy tr[X log X] (1-strongly convex w.r.t. the trace norm) and the squared
Frobenius norm ||X||_F^2 / 2 (1-strongly convex w.r.t. the Frobenius norm).
The entropy mirror map is the logit map exp(Y)/tr[exp(Y)]; the Frobenius
mirror map is Euclidean projection onto the density-matrix set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg

VN_ENTROPY_ID = "vn-entropy"
FROBENIUS_ID = "frobenius"


def simplex_project(v) -> np.ndarray:
    """Euclidean projection onto {x : x >= 0, sum(x) = 1} by sorted thresholding."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("input must be a non-empty real vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("input contains non-finite entries")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    counts = np.arange(1, v.size + 1)
    support = np.nonzero(u - (css - 1.0) / counts > 0.0)[0]
    rho = int(support[-1])
    theta = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(v - theta, 0.0)


def logit_map(y) -> np.ndarray:
    """Λ(Y) = exp(Y)/tr[exp(Y)] for Hermitian Y, stabilized by a λ_max shift.

    The shift multiplies numerator and denominator by the same scalar, so the
    output is exact while every intermediate stays in [0, 1].
    """
    spec = linalg.hermitian_eig(y)
    e = np.exp(spec.eigenvalues - spec.eigenvalues[0])
    v = spec.eigenvectors
    rho = (v * e) @ v.conj().T
    return linalg.hermitianize(rho / e.sum())


def orth_project_spectraplex(y) -> np.ndarray:
    """Euclidean projection onto the density-matrix set: project the spectrum."""
    spec = linalg.hermitian_eig(y)
    lam = simplex_project(spec.eigenvalues)
    v = spec.eigenvectors
    return linalg.hermitianize((v * lam) @ v.conj().T)


@dataclass(frozen=True)
class Regularizer:
    """A distance-generating function together with its induced maps.

    `strong_convexity_modulus` is 1 for both supported kinds, each w.r.t. its
    own norm (`norm_id`).
    """

    kind: str
    norm_id: str
    strong_convexity_modulus: float = 1.0

    def diameter_bound(self, dim: int) -> float:
        """Upper bound on the Bregman divergence from the uniform state."""
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == VN_ENTROPY_ID:
            return math.log(dim)
        return 2.0

    def dgf_value(self, x) -> float:
        """Value of the distance-generating function at a density matrix."""
        x = linalg.assert_hermitian(x, "state")
        if self.kind == VN_ENTROPY_ID:
            w = linalg.hermitian_eig(x).eigenvalues
            w = w[w > 0.0]
            return float(np.sum(w * np.log(w)))
        return 0.5 * float(np.linalg.norm(x)) ** 2

    def bregman(self, x, y) -> float:
        """Bregman divergence D_h(X || Y) of X from the reference point Y.

        Entropy case is the quantum relative entropy tr[X (log X - log Y)]
        and requires Y full rank; Frobenius case is ||X - Y||_F^2 / 2.
        """
        x = linalg.assert_hermitian(x, "state")
        y = linalg.assert_hermitian(y, "reference state")
        if x.shape != y.shape:
            raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
        if self.kind == VN_ENTROPY_ID:
            wy = linalg.hermitian_eig(y).eigenvalues
            if wy[-1] <= linalg.LOG_EIG_FLOOR:
                raise ValueError(
                    f"reference state is singular (min eigenvalue {wy[-1]:.3e}); "
                    "entropy divergence is infinite"
                )
            cross = linalg.trace_inner(x, linalg.herm_log(y)).real
            return self.dgf_value(x) - float(cross)
        return 0.5 * float(np.linalg.norm(x - y)) ** 2

    def mirror_map(self, y) -> np.ndarray:
        """Map a dual (gradient-space) matrix to a density matrix."""
        if self.kind == VN_ENTROPY_ID:
            return logit_map(y)
        return orth_project_spectraplex(y)

    def proximal_map(self, x, g, eta: float) -> np.ndarray:
        """Bregman proximal step from X along the ascent direction G.

        Entropy: Λ(log X + eta G).  Frobenius: project(X + eta G).
        """
        if not (eta > 0.0 and math.isfinite(eta)):
            raise ValueError(f"eta must be positive and finite, got {eta!r}")
        x = linalg.assert_hermitian(x, "state")
        g = linalg.assert_hermitian(g, "gradient")
        if x.shape != g.shape:
            raise ValueError(f"shape mismatch {x.shape} vs {g.shape}")
        if self.kind == VN_ENTROPY_ID:
            return logit_map(linalg.herm_log(x) + eta * g)
        return orth_project_spectraplex(x + eta * g)


VN_ENTROPY = Regularizer(VN_ENTROPY_ID, "schatten1")
FROBENIUS = Regularizer(FROBENIUS_ID, "frobenius")

_BY_ID = {VN_ENTROPY_ID: VN_ENTROPY, FROBENIUS_ID: FROBENIUS}


def from_id(reg_id: str) -> Regularizer:
    """Look up a regularizer by its stable string id."""
    try:
        return _BY_ID[reg_id]
    except KeyError:
        raise ValueError(
            f"unknown regularizer {reg_id!r}; expected one of {sorted(_BY_ID)}"
        ) from None


def dual_proximal_accumulate(dual, grads, eta: float):
    """Accumulate an entropy proximal step in the dual (log) domain: D' = D + eta G.

    Materializing Λ(D') reproduces proximal_map(Λ(D), G, eta) because the logit
    map is invariant to the trace-normalization shift hiding in log Λ(D).
    """
    if not (eta > 0.0 and math.isfinite(eta)):
        raise ValueError(f"eta must be positive and finite, got {eta!r}")
    return tuple(d + eta * g for d, g in zip(dual, grads, strict=True))
