"""Constructive model synthesis from a relative-frequency table.

Any valid table can be factored exactly by a model whose preparations are
pairwise-orthogonal pure states: one Hilbert-space block per a-setting, the
preparation fixed to the block's first basis vector, and per-(a, b) outcome
projectors built from an orthonormal basis whose first-coordinate moduli
squared reproduce the table row.  A companion generator appends an extra
orthogonal block to witness that the table puts no upper bound below 1 on
how far two resolutions can differ.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import KnobModel, Label, RelFreqTable

WEIGHT_SUM_TOL = 1e-12


@dataclass
class SynthesizedModel:
    """A factoring model plus its block bookkeeping."""

    model: KnobModel
    block_dims: dict[Label, int]
    a_vectors: dict[Label, np.ndarray]


def householder_basis(weights) -> np.ndarray:
    """Orthonormal columns f_c with |<f_c, e1>|^2 = weights[c].

    Real Householder reflection mapping e1 onto the sqrt-weight vector;
    falls back to the identity when the two nearly coincide.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("weights must be a non-empty vector")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
    n = w.size
    target = np.sqrt(w)
    e1 = np.zeros(n)
    e1[0] = 1.0
    q = e1 - target
    qq = q @ q
    if np.sqrt(qq) < 1e-14:
        return np.eye(n)
    return np.eye(n) - 2.0 * np.outer(q, q) / qq


def synthesize_model(nu: RelFreqTable) -> SynthesizedModel:
    """Build a model that factors the table exactly.

    Each a-setting gets a block of dimension |C| (uniform weights stand in
    for undefined (a, b) pairs so every resolution closes to the identity).
    All constructed vectors are real and non-negative.
    """
    space = nu.space
    n_out = len(space.outcomes)
    n_a = len(space.a_settings)
    dim = n_a * n_out

    block_dims = {a: n_out for a in space.a_settings}
    offsets = {a: i * n_out for i, a in enumerate(space.a_settings)}

    a_vectors = {}
    rho = {}
    for a in space.a_settings:
        vec = np.zeros(dim)
        vec[offsets[a]] = 1.0
        a_vectors[a] = vec
        rho[a] = np.outer(vec, vec).astype(complex)

    uniform = np.full(n_out, 1.0 / n_out)
    resolution: dict[Label, dict[Label, np.ndarray]] = {}
    for b in space.b_settings:
        blocks = {c: np.zeros((dim, dim), dtype=complex) for c in space.outcomes}
        for a in space.a_settings:
            weights = nu.rows.get((a, b), uniform)
            basis = householder_basis(weights)
            off = offsets[a]
            for ci, c in enumerate(space.outcomes):
                f = basis[:, ci]
                blocks[c][off : off + n_out, off : off + n_out] = np.outer(f, f)
        resolution[b] = blocks

    model = KnobModel(space=space, dim=dim, rho=rho, resolution=resolution)
    return SynthesizedModel(model=model, block_dims=block_dims, a_vectors=a_vectors)


def generate_inequivalent_model(nu: RelFreqTable, seed: int) -> KnobModel:
    """A second factoring model that differs from the synthesized one by an
    extra orthogonal one-dimensional block.

    Every preparation is zero on the extra block, so all probabilities (and
    hence the model distance to the base construction) are unchanged, yet
    the resolutions for different b-settings route the extra block to
    different outcomes, driving their operator-norm gap to 1.  The seed
    cyclically offsets that outcome assignment, so distinct seeds (mod |C|)
    give distinct models.
    """
    space = nu.space
    if len(space.b_settings) < 2:
        raise ValueError("need at least two b-settings to witness a resolution gap")
    if len(space.outcomes) < 2:
        raise ValueError(
            "need at least two outcome bins: with a single bin every resolution "
            "is the identity and no norm gap is possible"
        )
    base = synthesize_model(nu).model
    dim = base.dim + 1

    rho = {}
    for a, m in base.rho.items():
        big = np.zeros((dim, dim), dtype=complex)
        big[: base.dim, : base.dim] = m
        rho[a] = big

    n_out = len(space.outcomes)
    resolution: dict[Label, dict[Label, np.ndarray]] = {}
    for bi, b in enumerate(space.b_settings):
        assigned = space.outcomes[(bi + seed) % n_out]
        blocks = {}
        for c in space.outcomes:
            big = np.zeros((dim, dim), dtype=complex)
            big[: base.dim, : base.dim] = base.resolution[b][c]
            if c == assigned:
                big[-1, -1] = 1.0
            blocks[c] = big
        resolution[b] = blocks

    return KnobModel(space=space, dim=dim, rho=rho, resolution=resolution)
