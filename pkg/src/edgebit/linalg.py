"""Dense Hermitian linear algebra with the contracts the model layer relies on.

Operators are plain complex numpy arrays.  Every entry point checks the
Hermiticity / positivity contract it depends on and raises
:class:`ContractViolation` instead of silently producing garbage.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class ContractViolation(ValueError):
    """Input violates an operator contract (Hermiticity, PSD, dimensions)."""


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix has non-finite entries")
    return m


def ensure_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` as an array, raising unless it is Hermitian within ``tol``."""
    m = as_operator(a)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise ContractViolation(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return m


def hermitian_eigendecomposition(op) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, real) and orthonormal eigenvector columns of a Hermitian matrix."""
    m = ensure_hermitian(op)
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def hermitian_sqrt(op, neg_tol: float = DEFAULT_TOL) -> np.ndarray:
    """Positive-semidefinite square root via eigendecomposition.

    Eigenvalues in [-neg_tol, 0) are clamped to zero; anything below
    -neg_tol is a genuine PSD violation and raises.
    """
    vals, vecs = hermitian_eigendecomposition(op)
    if vals.size and vals[-1] < -neg_tol:
        raise ContractViolation(
            f"matrix is not positive semidefinite (min eigenvalue {vals[-1]:.3e})"
        )
    clamped = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * clamped) @ vecs.conj().T


def trace_product(a, b, imag_tol: float = DEFAULT_TOL) -> float:
    """Re Tr(a b) for Hermitian a, b of equal dimension.

    The imaginary part of the trace is asserted to be roundoff-small.
    """
    ma = ensure_hermitian(a)
    mb = ensure_hermitian(b)
    if ma.shape != mb.shape:
        raise ContractViolation(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    t = np.trace(ma @ mb)
    if abs(t.imag) > imag_tol:
        raise ContractViolation(f"Tr(ab) has non-negligible imaginary part {t.imag:.3e}")
    return float(t.real)


def operator_norm(a) -> float:
    """Spectral norm of a Hermitian matrix: max |eigenvalue|."""
    m = ensure_hermitian(a)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(m))))


@dataclass
class ValidationReport:
    """Diagnostic result: a list of violation descriptions, empty when valid."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_density(op, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the density-operator contract: Hermitian, unit trace, PSD."""
    report = ValidationReport()
    m = as_operator(op)
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        report.violations.append("not Hermitian")
        return report
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        report.violations.append(f"trace is {tr:.12g}, expected 1")
    vals = np.linalg.eigvalsh(m)
    if vals.size and vals[0] < -tol:
        report.violations.append(f"negative eigenvalue {vals[0]:.3e}")
    return report


def validate_resolution(blocks, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check a projective resolution of the identity.

    ``blocks`` is an ordered collection of Hermitian matrices, one per
    outcome.  Each must be an orthogonal projector, the blocks must be
    pairwise orthogonal, and they must sum to the identity.
    """
    report = ValidationReport()
    mats = [as_operator(b) for b in blocks]
    if not mats:
        report.violations.append("empty resolution")
        return report
    dim = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != dim:
            report.violations.append(f"block {i}: dimension mismatch")
            return report
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            report.violations.append(f"block {i}: not Hermitian")
        if np.max(np.abs(m @ m - m)) > tol:
            report.violations.append(f"block {i}: not idempotent")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.max(np.abs(mats[i] @ mats[j])) > tol:
                report.violations.append(f"blocks {i},{j}: not orthogonal")
    total = sum(mats)
    if np.max(np.abs(total - np.eye(dim))) > tol:
        report.violations.append("blocks do not sum to identity")
    return report
