"""Small dense Hermitian matrix kernel.

Matrices here are at most 8x8, so everything is done with plain numpy and a
cyclic Jacobi eigensolver rather than LAPACK.  Complex Hermitian matrices are
diagonalised through their real symmetric embedding ``[[X, -Y], [Y, X]]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
_JACOBI_MAX_SWEEPS = 60
MAX_DIM = 8


class FieldTag(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def coerce(cls, value: "FieldTag | str") -> "FieldTag":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown field {value!r}; expected 'real' or 'complex'") from None


class NotPSDError(ValueError):
    """Raised when a matrix that must be positive semidefinite is not."""

    def __init__(self, min_eig: float, tol: float = PSD_TOL):
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {min_eig:.6g} < -{tol:g})")
        self.min_eig = min_eig


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """An n x n Hermitian matrix stored as separate real and imaginary parts.

    Use :meth:`from_array` to build one; it checks the Hermitian symmetry and
    the field tag.  Instances are immutable (the arrays are write-protected).
    """

    re: np.ndarray
    im: np.ndarray
    field: FieldTag

    @classmethod
    def from_array(cls, values, field: FieldTag | str | None = None, *, tol: float = 1e-12) -> "HermitianMatrix":
        arr = np.asarray(values)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        n = arr.shape[0]
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"dimension must be between 1 and {MAX_DIM}, got {n}")
        arr = arr.astype(complex)
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix has non-finite entries")
        if field is None:
            field = FieldTag.REAL if np.all(arr.imag == 0) else FieldTag.COMPLEX
        field = FieldTag.coerce(field)
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr - arr.conj().T)) > tol * scale:
            raise ValueError("matrix is not Hermitian")
        if field is FieldTag.REAL and np.any(arr.imag != 0):
            raise ValueError("real-field matrix has nonzero imaginary parts")
        arr = 0.5 * (arr + arr.conj().T)
        re = np.ascontiguousarray(arr.real, dtype=float)
        im = np.ascontiguousarray(arr.imag, dtype=float)
        if field is FieldTag.REAL:
            im = np.zeros_like(re)
        re.flags.writeable = False
        im.flags.writeable = False
        return cls(re, im, field)

    @classmethod
    def identity(cls, n: int, field: FieldTag | str = FieldTag.REAL) -> "HermitianMatrix":
        return cls.from_array(np.eye(n), field)

    @property
    def n(self) -> int:
        return self.re.shape[0]

    @property
    def values(self) -> np.ndarray:
        """The entries as a fresh complex (or float, for real field) array."""
        if self.field is FieldTag.REAL:
            return self.re.copy()
        return self.re + 1j * self.im

    def scaled(self, c: float) -> "HermitianMatrix":
        return HermitianMatrix.from_array(self.values * float(c), self.field)

    def as_field(self, field: FieldTag | str) -> "HermitianMatrix":
        return HermitianMatrix.from_array(self.values, field)

    def to_json(self) -> dict:
        out = {"n": self.n, "field": self.field.value, "re": self.re.tolist()}
        if self.field is FieldTag.COMPLEX:
            out["im"] = self.im.tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "HermitianMatrix":
        """Parse ``{"n", "field", "re", "im"?}``; raises ValueError on schema violations."""
        if not isinstance(obj, dict):
            raise ValueError("matrix JSON must be an object")
        for key in ("n", "field", "re"):
            if key not in obj:
                raise ValueError(f"matrix JSON missing key {key!r}")
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError("'n' must be an integer")
        field = FieldTag.coerce(obj["field"])
        re = np.asarray(obj["re"], dtype=float)
        if re.shape != (n, n):
            raise ValueError(f"'re' must be {n}x{n}, got shape {re.shape}")
        if field is FieldTag.COMPLEX:
            if "im" not in obj:
                raise ValueError("complex matrix JSON requires 'im'")
            im = np.asarray(obj["im"], dtype=float)
            if im.shape != (n, n):
                raise ValueError(f"'im' must be {n}x{n}, got shape {im.shape}")
        else:
            if "im" in obj and np.any(np.asarray(obj["im"], dtype=float) != 0):
                raise ValueError("real matrix JSON must not carry nonzero 'im'")
            im = np.zeros((n, n))
        return cls.from_array(re + 1j * im, field)

    def __repr__(self) -> str:
        return f"HermitianMatrix(n={self.n}, field={self.field.value}, values={self.values.tolist()!r})"


@dataclass(frozen=True)
class SeededRng:
    """Explicit, immutable RNG seed.  Streams come from numpy's PCG64.

    ``child(k)`` derives an independent seed for the k-th restart, so results
    never depend on how many siblings were drawn before.
    """

    seed: int
    algorithm: str = "PCG64"

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed % 2**64))

    def child(self, index: int) -> "SeededRng":
        ss = np.random.SeedSequence([self.seed % 2**64, int(index)])
        return SeededRng(int(ss.generate_state(1, np.uint64)[0]), self.algorithm)


def _check_pair(a: HermitianMatrix, b: HermitianMatrix) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.field is not b.field:
        raise ValueError(f"field mismatch: {a.field.value} vs {b.field.value}")


def hs_inner(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """Hilbert-Schmidt pairing ``sum_ij a_ij * conj(b_ij)``."""
    _check_pair(a, b)
    re = float(np.sum(a.re * b.re + a.im * b.im))
    im = float(np.sum(a.im * b.re - a.re * b.im))
    scale = 1.0 + float(np.sum(np.abs(a.re) + np.abs(a.im))) * float(np.max(np.abs(b.re) + np.abs(b.im)))
    assert abs(im) < 1e-12 * scale, f"imaginary residue {im} in Hermitian pairing"
    return re


def jacobi_eigh(sym: np.ndarray, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Returns ``(eigenvalues, vectors)`` with eigenvectors as columns, eigenvalues
    ascending.  Sweeps stop once every off-diagonal magnitude is below
    ``tol * max(1, max|entry|)``.
    """
    a = np.array(sym, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    thresh = tol * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diag(a)))
        if n < 2 or off.max() < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < thresh * 1e-3:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _embedding(a: HermitianMatrix) -> np.ndarray:
    return np.block([[a.re, -a.im], [a.im, a.re]])


def eigvalsh(a: HermitianMatrix) -> np.ndarray:
    """Eigenvalues (ascending) of a Hermitian matrix via Jacobi."""
    if a.field is FieldTag.REAL:
        return jacobi_eigh(a.re)[0]
    # Each eigenvalue of the complex matrix appears twice in the embedding.
    w = jacobi_eigh(_embedding(a))[0]
    return 0.5 * (w[0::2] + w[1::2])


def min_eig(a: HermitianMatrix) -> float:
    return float(eigvalsh(a)[0])


def is_psd(a: HermitianMatrix, tol: float = PSD_TOL) -> bool:
    return min_eig(a) >= -tol


def require_psd(a: HermitianMatrix, tol: float = PSD_TOL) -> None:
    lam = min_eig(a)
    if lam < -tol:
        raise NotPSDError(lam, tol)


def psd_sqrt(a: HermitianMatrix, tol: float = PSD_TOL) -> HermitianMatrix:
    """Positive square root; eigenvalues in ``[-tol, 0)`` are clamped to zero."""
    if a.field is FieldTag.REAL:
        w, v = jacobi_eigh(a.re)
    else:
        w, v = jacobi_eigh(_embedding(a))
    if w[0] < -tol:
        raise NotPSDError(float(w[0]), tol)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    if a.field is FieldTag.REAL:
        return HermitianMatrix.from_array(root, FieldTag.REAL, tol=1e-9)
    n = a.n
    block = 0.5 * (root[:n, :n] + root[n:, n:]) + 0.5j * (root[n:, :n] - root[:n, n:])
    return HermitianMatrix.from_array(block, FieldTag.COMPLEX, tol=1e-9)


def abs_entrywise(a: HermitianMatrix) -> HermitianMatrix:
    """The 2x2 modulus map: keep the diagonal, replace ``a12`` by ``|a12|``."""
    if a.n != 2:
        raise ValueError(f"abs_entrywise is defined for 2x2 matrices only, got n={a.n}")
    m = abs(complex(a.re[0, 1], a.im[0, 1]))
    return HermitianMatrix.from_array(np.array([[a.re[0, 0], m], [m, a.re[1, 1]]]), a.field)


def random_psd(n: int, field: FieldTag | str, rng: SeededRng) -> HermitianMatrix:
    """Gram matrix ``G G*`` of an n x n standard normal matrix drawn from ``rng``."""
    if not 2 <= n <= MAX_DIM:
        raise ValueError(f"n must be between 2 and {MAX_DIM}, got {n}")
    field = FieldTag.coerce(field)
    gen = rng.generator()
    g = gen.standard_normal((n, n))
    if field is FieldTag.COMPLEX:
        g = g + 1j * gen.standard_normal((n, n))
    return HermitianMatrix.from_array(g @ g.conj().T, field, tol=1e-9)
