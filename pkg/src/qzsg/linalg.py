"""Dense complex linear algebra for Hermitian matrices of dimension 2^k.

All functions operate on square complex numpy arrays and return fresh arrays;
nothing mutates its input.  Results that are Hermitian in exact arithmetic
are re-symmetrized through the (A + A†)/2 guard so that downstream tolerance
checks stay sharp after long chains of floating-point arithmetic.
"""

from __future__ import annotations

import threading
from itertools import product
from typing import Callable, NamedTuple

import numpy as np

HERMITIAN_RTOL = 1e-10
PSD_EIG_TOL = 1e-9
LOG_EIG_FLOOR = 1e-15

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


class NumericalError(RuntimeError):
    """An eigensolver failed to converge or a kernel produced non-finite values."""


class Spectrum(NamedTuple):
    """Eigendecomposition with eigenvalues sorted descending, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class _ClampCounter:
    """Tally of eigenvalues clamped up to the log floor.  Diagnostic only; no
    algorithm reads it."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def add(self, k: int) -> None:
        with self._lock:
            self._count += k

    def reset(self) -> None:
        with self._lock:
            self._count = 0

    @property
    def count(self) -> int:
        return self._count


log_clamp_counter = _ClampCounter()


def as_matrix(a) -> np.ndarray:
    """Coerce to a square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def assert_finite(m: np.ndarray, what: str = "matrix") -> None:
    if not np.all(np.isfinite(m.view(float) if np.iscomplexobj(m) else m)):
        raise ValueError(f"{what} contains non-finite entries")


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2."""
    return (a + a.conj().T) / 2.0


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of M from M†."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def assert_hermitian(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate M = M† within HERMITIAN_RTOL relative to the largest entry."""
    m = as_matrix(m)
    assert_finite(m, what)
    scale = 1.0 + float(np.max(np.abs(m))) if m.size else 1.0
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_RTOL * scale:
        raise ValueError(f"{what} is not Hermitian (defect {defect:.3e})")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product A ⊗ B."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Trace out one tensor factor of an operator on C^(dim_a) ⊗ C^(dim_b).

    keep="A" returns tr_B[M] (dim_a x dim_a); keep="B" returns tr_A[M].
    """
    m = as_matrix(m)
    if dim_a < 1 or dim_b < 1 or m.shape[0] != dim_a * dim_b:
        raise ValueError(
            f"matrix of dimension {m.shape[0]} does not factor as {dim_a} x {dim_b}"
        )
    blocks = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("abcb->ac", blocks)
    if keep == "B":
        return np.einsum("abad->bd", blocks)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def hermitian_eig(h) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Ties keep the ascending-solver order reversed, so output is deterministic.
    Reconstruction V diag(w) V† matches the input to ~1e-10 relative error.
    """
    h = assert_hermitian(h)
    try:
        w, v = np.linalg.eigh(hermitianize(h))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])


def spectral_fn(h, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its eigenvalues."""
    spec = hermitian_eig(h)
    fw = np.asarray(f(spec.eigenvalues), dtype=float)
    if fw.shape != spec.eigenvalues.shape:
        raise ValueError("f must map the eigenvalue vector elementwise")
    if not np.all(np.isfinite(fw)):
        bad = spec.eigenvalues[~np.isfinite(fw)][0]
        raise ValueError(f"function undefined at eigenvalue {bad!r}")
    v = spec.eigenvectors
    return hermitianize((v * fw) @ v.conj().T)


def herm_log(h, floor: float = LOG_EIG_FLOOR) -> np.ndarray:
    """Matrix logarithm of a PSD matrix, eigenvalues clamped up to `floor`.

    Eigenvalues below -PSD_EIG_TOL are rejected; values in [-PSD_EIG_TOL, floor)
    are treated as underflow of a strictly positive quantity and clamped, with
    the clamp recorded in `log_clamp_counter`.
    """
    spec = hermitian_eig(h)
    w = spec.eigenvalues
    if w[-1] < -PSD_EIG_TOL:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[-1]:.3e})")
    clamped = np.maximum(w, floor)
    n_clamped = int(np.sum(w < floor))
    if n_clamped:
        log_clamp_counter.add(n_clamped)
    v = spec.eigenvectors
    return hermitianize((v * np.log(clamped)) @ v.conj().T)


def frobenius_norm(m) -> float:
    """Frobenius norm, valid for any matrix."""
    return float(np.linalg.norm(as_matrix(m)))


def schatten1_norm(h) -> float:
    """Trace norm (sum of |eigenvalues|) of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eig(h).eigenvalues)))


def spectral_norm(h) -> float:
    """Operator norm (max |eigenvalue|) of a Hermitian matrix."""
    w = hermitian_eig(h).eigenvalues
    return float(max(abs(w[0]), abs(w[-1]))) if w.size else 0.0


def norms(m) -> dict[str, float]:
    """Frobenius, Schatten-1, and spectral norms of a Hermitian matrix."""
    m = assert_hermitian(m)
    w = hermitian_eig(m).eigenvalues
    return {
        "frobenius": float(np.linalg.norm(m)),
        "schatten1": float(np.sum(np.abs(w))),
        "spectral": float(max(abs(w[0]), abs(w[-1]))),
    }


def trace_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(A†B)."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def pauli_strings(n_qubits: int) -> list[str]:
    """All length-n strings over {I, X, Y, Z} in lexicographic order."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return ["".join(p) for p in product("IXYZ", repeat=n_qubits)]


def pauli_matrix(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis named by `label`."""
    if not label or any(c not in PAULI_1Q for c in label):
        raise ValueError(f"invalid Pauli label {label!r}")
    m = PAULI_1Q[label[0]]
    for c in label[1:]:
        m = np.kron(m, PAULI_1Q[c])
    return m


def pauli_decompose(m, n_qubits: int) -> dict[str, complex]:
    """Coefficients M̂(P) = tr(P†M)/2^n for every n-qubit Pauli string P."""
    m = as_matrix(m)
    dim = 2**n_qubits
    if m.shape[0] != dim:
        raise ValueError(
            f"matrix dimension {m.shape[0]} does not match {n_qubits} qubits (need {dim})"
        )
    scale = 1.0 / dim
    return {
        label: trace_inner(pauli_matrix(label), m) * scale
        for label in pauli_strings(n_qubits)
    }


def pauli_reconstruct(coefficients: dict[str, complex], n_qubits: int) -> np.ndarray:
    """Sum of coefficient * Pauli matrix; inverse of `pauli_decompose`."""
    dim = 2**n_qubits
    m = np.zeros((dim, dim), dtype=complex)
    for label, c in coefficients.items():
        p = pauli_matrix(label)
        if p.shape[0] != dim:
            raise ValueError(f"label {label!r} does not match {n_qubits} qubits")
        m += c * p
    return m


def matrix_to_jsonable(m) -> list:
    """Encode a complex matrix as nested rows of [re, im] pairs."""
    m = as_matrix(m)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def matrix_from_jsonable(rows) -> np.ndarray:
    """Decode the [re, im] row encoding produced by `matrix_to_jsonable`."""
    if not isinstance(rows, list) or not rows:
        raise ValueError("matrix encoding must be a non-empty list of rows")
    n = len(rows)
    m = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ValueError("matrix encoding must be square")
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValueError("matrix entries must be [re, im] pairs")
            m[i, j] = complex(float(entry[0]), float(entry[1]))
    assert_finite(m, "decoded matrix")
    return m
