"""Dense complex linear algebra for small Hilbert spaces.

Everything operates on plain ``numpy`` arrays of ``complex`` dtype.  The
eigensolver is a cyclic Jacobi iteration implemented here so that spectral
results are reproducible bit-for-bit across BLAS builds; dimensions stay
small (a few qubits), where Jacobi is both robust and fast enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

#: Hard ceiling on Hilbert-space dimension; tensor products beyond this abort.
MAX_HILBERT_DIM = 4096

_OFFDIAG_STOP = 1e-14  # relative off-diagonal Frobenius mass at convergence
_MAX_SWEEPS = 60


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi iteration fails to reach its stopping rule."""


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian part, (a + a†)/2."""
    return 0.5 * (a + dagger(a))


def is_hermitian(a: np.ndarray, tol: float) -> bool:
    """True when max |a - a†| <= tol."""
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def is_unitary(a: np.ndarray, tol: float) -> bool:
    """True when max |a†a - 1| <= tol."""
    d = a.shape[0]
    return bool(np.max(np.abs(dagger(a) @ a - np.eye(d))) <= tol)


def is_psd(a: np.ndarray, tol: float) -> bool:
    """True when a is Hermitian (to tol) with eigenvalues >= -tol."""
    if not is_hermitian(a, tol):
        return False
    return bool(hermitian_eig(hermitianize(a)).values[0] >= -tol)


def tensor_product(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices, with a dimension guard."""
    if not factors:
        raise ValueError("tensor_product needs at least one factor")
    dim = 1
    for f in factors:
        dim *= f.shape[0]
    if dim > MAX_HILBERT_DIM:
        raise ValueError(f"tensor product dimension {dim} exceeds {MAX_HILBERT_DIM}")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def hs_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt overlap Re tr[a b].

    For density matrices this is the recurrence probability; it lies in
    [0, 1] and equals the purity when ``b is a``.
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.einsum("ij,ji->", a, b).real)


@dataclass(frozen=True)
class DensityMatrix:
    """A state on a tensor product of finite subsystems.

    Hermiticity and unit trace are enforced at construction (1e-10).
    Positivity is *not* re-checked on every instance -- evolution by
    unitaries and Kraus maps preserves it -- call :meth:`validate` at
    trust boundaries (user-supplied matrices, file input).
    """

    matrix: np.ndarray
    subsystem_dims: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "subsystem_dims", tuple(int(d) for d in self.subsystem_dims))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got {m.shape}")
        dim = int(np.prod(self.subsystem_dims))
        if dim != m.shape[0]:
            raise ValueError(
                f"subsystem dims {self.subsystem_dims} give {dim}, matrix is {m.shape[0]}"
            )
        if not is_hermitian(m, 1e-10):
            raise ValueError("density matrix is not Hermitian within 1e-10")
        if abs(np.trace(m).real - 1.0) > 1e-10 or abs(np.trace(m).imag) > 1e-10:
            raise ValueError("density matrix trace differs from 1 beyond 1e-10")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return hs_overlap(self.matrix, self.matrix)

    def validate(self, tol: float = 1e-10) -> None:
        """Full check including positivity; raises ValueError on failure."""
        lo = hermitian_eig(hermitianize(self.matrix)).values[0]
        if lo < -tol:
            raise ValueError(f"density matrix has eigenvalue {lo} < -{tol}")


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    keep = sorted(set(int(k) for k in keep))
    dims = rho.subsystem_dims
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    if not keep:
        raise ValueError("must keep at least one subsystem")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    # trace out dropped subsystems from highest index down so axes stay valid
    dropped = [q for q in range(n) if q not in keep]
    remaining = n
    for q in sorted(dropped, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + remaining)
        remaining -= 1
    kept_dims = tuple(dims[q] for q in keep)
    d = int(np.prod(kept_dims))
    return DensityMatrix(t.reshape(d, d), kept_dims)


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    values: np.ndarray
    vectors: np.ndarray  # column k pairs with values[k]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ dagger(self.vectors)


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing a[p, q], updating a and v in place."""
    apq = a[p, q]
    mag = abs(apq)
    if mag == 0.0:
        return
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    sp = s * phase
    # columns: M[:, p] <- c M[:, p] - s e^{-i phi} M[:, q];  M[:, q] <- s e^{i phi} M[:, p] + c M[:, q]
    col_p = a[:, p].copy()
    a[:, p] = c * col_p - sp.conjugate() * a[:, q]
    a[:, q] = sp * col_p + c * a[:, q]
    row_p = a[p, :].copy()
    a[p, :] = c * row_p - sp * a[q, :]
    a[q, :] = sp.conjugate() * row_p + c * a[q, :]
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    vcol_p = v[:, p].copy()
    v[:, p] = c * vcol_p - sp.conjugate() * v[:, q]
    v[:, q] = sp * vcol_p + c * v[:, q]


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eig(h: np.ndarray, max_sweeps: int = _MAX_SWEEPS) -> HermitianEigen:
    """Diagonalize a Hermitian matrix by cyclic Jacobi sweeps.

    Stops when the off-diagonal Frobenius mass drops below
    ``1e-14 * ||h||_F``; raises ConvergenceError if ``max_sweeps`` cyclic
    sweeps do not get there.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got {h.shape}")
    if not is_hermitian(h, 1e-9):
        raise ValueError("matrix is not Hermitian within 1e-9")
    d = h.shape[0]
    a = hermitianize(h)
    v = np.eye(d, dtype=complex)
    if d == 1:
        return HermitianEigen(np.array([a[0, 0].real]), v)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return HermitianEigen(np.zeros(d), v)
    stop = _OFFDIAG_STOP * norm
    converged = _offdiag_norm(a) <= stop
    for _ in range(max_sweeps):
        if converged:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                if abs(a[p, q]) > 0.0:
                    _jacobi_rotate(a, v, p, q)
        converged = _offdiag_norm(a) <= stop
    if not converged:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    values = np.diag(a).real.copy()
    order = np.argsort(values, kind="stable")
    return HermitianEigen(values[order], v[:, order])


def neg_log(values: np.ndarray) -> np.ndarray:
    """Spectral map x -> -ln x; rejects spectra touching zero."""
    values = np.asarray(values, dtype=float)
    if np.min(values) <= 1e-14:
        raise ValueError(f"neg_log needs eigenvalues > 1e-14, got min {np.min(values)}")
    return -np.log(values)


def exp_scaled(beta: float) -> Callable[[np.ndarray], np.ndarray]:
    """Spectral map factory x -> exp(-beta x)."""

    def f(values: np.ndarray) -> np.ndarray:
        return np.exp(-beta * np.asarray(values, dtype=float))

    return f


def matrix_fn(h: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply ``f`` to the spectrum of Hermitian ``h``: V f(diag) V†."""
    eig = hermitian_eig(h)
    w = np.asarray(f(eig.values), dtype=float)
    return (eig.vectors * w) @ dagger(eig.vectors)
