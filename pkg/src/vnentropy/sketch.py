"""Random-projection entropy estimation for low-rank density matrices.

Post-multiplying R by a random projection Pi (n x s) preserves the
nonzero singular values of a rank-k matrix up to relative error, so the
entropy can be read off the top-k singular values of the sketch
R~ = R Pi.  Three projections are provided:

* ``gaussian``: entrywise standard normal, scaled 1/sqrt(s) so that
  E[Pi Pi^T] = I;
* ``srht``: subsampled randomized Hadamard transform
  sqrt(n'/s) * D H S with the dimension zero-padded to the next power of
  two n';
* ``countsketch``: one random +-1 per input coordinate, applied in
  O(nnz(R)).

``exact_debug`` uses Pi = I (s = n) and reproduces the spectrum exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .densmat import SparseSymMatrix
from .linalg import entropy_from_probs, thin_singular_values
from .rng import (
    RngStream,
    gaussian_vector,
    rademacher_vector,
    uniform_indices,
)

PROJECTION_KINDS = ("gaussian", "srht", "countsketch", "exact_debug")
SKETCH_CLAMP = 1e-12


@dataclass(frozen=True)
class ProjectionSpec:
    """Which projection to apply, its width s, and the randomness source."""

    kind: str
    s: int
    stream: RngStream

    def __post_init__(self) -> None:
        if self.kind not in PROJECTION_KINDS:
            raise ValueError(f"kind must be one of {PROJECTION_KINDS}, got {self.kind!r}")
        if self.s < 1:
            raise ValueError("s must be at least 1")


@dataclass(frozen=True)
class SketchSpectrum:
    """Approximate probabilities recovered from a sketch plus their entropy."""

    probs_tilde: np.ndarray
    entropy_tilde: float
    kind: str
    s: int


def fwht_inplace(x: np.ndarray) -> np.ndarray:
    """Orthonormal Walsh-Hadamard transform of a power-of-two-length vector,
    in place (the array is also returned)."""
    if x.ndim != 1:
        raise ValueError("expected a 1-d array")
    _fwht_axis0(x[:, None])
    return x


def _fwht_axis0(a: np.ndarray) -> np.ndarray:
    """Apply the orthonormal Hadamard transform down each column, in place."""
    n = a.shape[0]
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    h = 1
    while h < n:
        view = a.reshape(n // (2 * h), 2, h, -1)
        top = view[:, 0].copy()
        bot = view[:, 1].copy()
        view[:, 0] = top + bot
        view[:, 1] = top - bot
        h *= 2
    a /= math.sqrt(n)
    return a


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def apply_gaussian(R: SparseSymMatrix, s: int, stream: RngStream) -> np.ndarray:
    """Sketch R~ = R (G / sqrt(s)) with G entrywise standard normal.

    The 1/sqrt(s) scale makes E[Pi Pi^T] = I, so singular values of the
    sketch track the probabilities directly.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    g = gaussian_vector(stream, R.n * s).reshape(R.n, s)
    return R.matmat(g / math.sqrt(s))


def apply_srht(R: SparseSymMatrix, s: int, stream: RngStream) -> np.ndarray:
    """Sketch through Pi = sqrt(n'/s) D H S, padded to n' = next power of two.

    Exploits symmetry: rows of H D R_pad at the s sampled indices are the
    transposed sketch columns.  The dense O(n'^2 log n') transform is fine
    at desk scale.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    n = R.n
    np2 = _next_pow2(n)
    signs = rademacher_vector(stream.child(0), np2)
    sampled = uniform_indices(stream.child(1), np2, s)
    a = np.zeros((np2, n), dtype=np.float64)
    a[:n, :] = R.to_dense()
    a *= signs[:, None]
    _fwht_axis0(a)
    return math.sqrt(np2 / s) * a[sampled, :].T


def apply_countsketch(R: SparseSymMatrix, s: int, stream: RngStream) -> np.ndarray:
    """Sketch with one random sign per coordinate, in O(nnz(R)).

    Row t of Pi holds a single +-1 in a uniformly chosen column; R Pi
    scatters each stored column of R into one sketch column.
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    cols = uniform_indices(stream.child(0), s, R.n)
    signs = rademacher_vector(stream.child(1), R.n)
    pi = sp.csc_matrix(
        (signs, (np.arange(R.n), cols)), shape=(R.n, s), dtype=np.float64
    )
    return (R.scipy_csr @ pi).toarray()


def countsketch_matrix(s: int, n: int, stream: RngStream) -> np.ndarray:
    """Dense Pi of the countsketch projection (small-case inspection helper)."""
    cols = uniform_indices(stream.child(0), s, n)
    signs = rademacher_vector(stream.child(1), n)
    pi = np.zeros((n, s), dtype=np.float64)
    pi[np.arange(n), cols] = signs
    return pi


def default_s_sketch(
    kind: str, n: int, k: int, epsilon: float, scale: float = 1.0
) -> int:
    """Sketch width for the requested projection, capped at n.

    gaussian / srht: ceil((k + ceil(ln n)) * max(1, ceil(ln k)) / eps^2);
    countsketch:     ceil(k^2 / eps^2).
    Only asymptotic widths are known, so the leading constant is exposed
    as ``scale`` rather than being tuned silently.
    """
    if kind not in ("gaussian", "srht", "countsketch"):
        raise ValueError(f"no default width for projection kind {kind!r}")
    if k < 1 or n < 1:
        raise ValueError("n and k must be at least 1")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    if kind == "countsketch":
        s = math.ceil(scale * k**2 / epsilon**2)
    else:
        s = math.ceil(
            scale * (k + math.ceil(math.log(n))) * max(1, math.ceil(math.log(k))) / epsilon**2
        )
    return min(n, max(1, s))


def sketch_entropy(R: SparseSymMatrix, k: int, spec: ProjectionSpec) -> SketchSpectrum:
    """Approximate the top-k probabilities and entropy from a sketch of R.

    The caller asserts rank(R) <= k; the recovered values are the top-k
    singular values of R Pi with entropy taken over those above the
    clamp.
    """
    if not 1 <= k <= R.n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={R.n}")
    if spec.kind == "gaussian":
        sketch = apply_gaussian(R, spec.s, spec.stream)
        s_used = spec.s
    elif spec.kind == "srht":
        sketch = apply_srht(R, spec.s, spec.stream)
        s_used = spec.s
    elif spec.kind == "countsketch":
        sketch = apply_countsketch(R, spec.s, spec.stream)
        s_used = spec.s
    else:  # exact_debug: Pi = I_n
        sketch = R.to_dense()
        s_used = R.n
    probs = thin_singular_values(sketch, min(k, min(sketch.shape)))
    return SketchSpectrum(
        probs_tilde=probs,
        entropy_tilde=entropy_from_probs(probs, SKETCH_CLAMP),
        kind=spec.kind,
        s=s_used,
    )
