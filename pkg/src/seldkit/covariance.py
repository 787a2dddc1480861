"""Spatial covariance estimation and principal eigenvectors for small arrays.

The covariance R(t, f) = E[X X^H] is realized as the average of the
per-bin outer products over a small time-frequency neighborhood.  The
principal eigenvector of each R approximates the array steering vector on
bins dominated by a single source, which is what the eigenvector-based
spatial feature consumes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScmField",
    "EigPair",
    "estimate_scm",
    "principal_eigenvector",
    "principal_eigenvectors",
    "coherence",
    "coherence_field",
]


@dataclass
class ScmField:
    """Covariance matrices per time-frequency bin, shape (T, F, M, M).

    The field may cover only a slice of the spectrogram's frequency axis;
    bin_offset and freq_resolution recover each matrix's physical frequency.
    """

    scms: np.ndarray
    time_radius: int
    freq_radius: int
    freq_resolution: float
    bin_offset: int = 0
    n_bins_total: int | None = None

    @property
    def n_frames(self) -> int:
        return self.scms.shape[0]

    @property
    def n_bins(self) -> int:
        return self.scms.shape[1]

    @property
    def n_channels(self) -> int:
        return self.scms.shape[2]

    @property
    def frequencies(self) -> np.ndarray:
        return (self.bin_offset + np.arange(self.n_bins)) * self.freq_resolution


def _windowed_mean(values: np.ndarray, radius: int, axis: int) -> np.ndarray:
    """Mean over a clipped window of +-radius along one axis via cumsum."""
    if radius == 0:
        return values
    n = values.shape[axis]
    csum = np.cumsum(values, axis=axis)
    csum = np.concatenate([np.zeros_like(np.take(csum, [0], axis=axis)), csum], axis=axis)
    hi = np.minimum(np.arange(n) + radius + 1, n)
    lo = np.maximum(np.arange(n) - radius, 0)
    window_sum = np.take(csum, hi, axis=axis) - np.take(csum, lo, axis=axis)
    count_shape = [1] * values.ndim
    count_shape[axis] = n
    counts = (hi - lo).reshape(count_shape)
    return window_sum / counts


def estimate_scm(
    spec,
    time_radius: int = 1,
    freq_radius: int = 1,
    freq_range: tuple[int, int] | None = None,
) -> ScmField:
    """Estimate R(t, f) by averaging X X^H over a (2*tr+1) x (2*fr+1) patch.

    The neighborhood is clipped at the spectrogram edges.  freq_range
    restricts the output to bins [lo, hi] inclusive; the averaging
    neighborhood still draws on bins outside the range where available.
    """
    X = np.asarray(spec.data)  # (M, T, F)
    if X.shape[0] < 2:
        raise ValueError("covariance estimation needs at least 2 channels")
    if time_radius < 0 or freq_radius < 0:
        raise ValueError("radii must be non-negative")

    n_bins_total = X.shape[2]
    lo, hi = (0, n_bins_total - 1) if freq_range is None else freq_range
    if not (0 <= lo <= hi < n_bins_total):
        raise ValueError(f"freq_range {freq_range} outside [0, {n_bins_total - 1}]")
    # margin so bins near the range edges still see their full neighborhood
    mlo = max(0, lo - freq_radius)
    mhi = min(n_bins_total - 1, hi + freq_radius)
    X = X[:, :, mlo : mhi + 1]

    outer = np.einsum("itf,jtf->tfij", X, np.conj(X))
    outer = _windowed_mean(outer, time_radius, axis=0)
    outer = _windowed_mean(outer, freq_radius, axis=1)

    # margin bins can have clipped-at-margin neighborhoods; drop them
    scms = outer[:, lo - mlo : lo - mlo + (hi - lo + 1)]
    return ScmField(
        scms=scms,
        time_radius=time_radius,
        freq_radius=freq_radius,
        freq_resolution=spec.freq_resolution,
        bin_offset=lo,
        n_bins_total=n_bins_total,
    )


@dataclass(frozen=True)
class EigPair:
    """Largest eigenvalue and a unit-norm eigenvector (global phase arbitrary)."""

    value: float
    vector: np.ndarray


def _check_hermitian(R: np.ndarray, tol: float) -> None:
    dev = np.abs(R - R.conj().T).max()
    scale = max(np.abs(R).max(), 1.0)
    if dev > tol * scale:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3g})")


def principal_eigenvector(R: np.ndarray, herm_tol: float = 1e-6) -> EigPair:
    """Dominant eigenpair of a Hermitian PSD matrix."""
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ValueError("expected a square matrix")
    _check_hermitian(R, herm_tol)
    w, v = np.linalg.eigh(R)
    return EigPair(value=float(w[-1]), vector=v[:, -1])


def principal_eigenvectors(
    scms: np.ndarray, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Batched dominant eigenpairs for a (..., M, M) stack of Hermitian matrices.

    Returns (values, vectors) with shapes (...,) and (..., M).  The batch is
    chunked along the leading axis across a thread pool; results do not
    depend on the thread count.
    """
    scms = np.asarray(scms)
    lead = scms.shape[:-2]
    m = scms.shape[-1]
    flat = scms.reshape(-1, m, m)
    values = np.empty(flat.shape[0])
    vectors = np.empty((flat.shape[0], m), dtype=complex)

    def solve(sl: slice) -> None:
        w, v = np.linalg.eigh(flat[sl])
        values[sl] = w[:, -1]
        vectors[sl] = v[:, :, -1]

    if threads <= 1 or flat.shape[0] < 2 * threads:
        solve(slice(None))
    else:
        bounds = np.linspace(0, flat.shape[0], threads + 1).astype(int)
        slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(solve, slices))
    return values.reshape(lead), vectors.reshape(lead + (m,))


def coherence(R: np.ndarray, herm_tol: float = 1e-6) -> float:
    """Ratio of the largest eigenvalue to the trace, in [1/M, 1].

    1 for a rank-1 (single-source) covariance, 1/M for a fully diffuse one.
    """
    R = np.asarray(R)
    trace = float(np.trace(R).real)
    if trace <= 0:
        raise ValueError("coherence undefined for zero-trace matrix")
    return principal_eigenvector(R, herm_tol).value / trace


def coherence_field(scms: np.ndarray, threads: int = 1) -> np.ndarray:
    """Batched coherence for a (..., M, M) stack."""
    values, _ = principal_eigenvectors(scms, threads=threads)
    traces = np.trace(scms, axis1=-2, axis2=-1).real
    out = np.full(values.shape, np.nan)
    ok = traces > 0
    out[ok] = values[ok] / traces[ok]
    return out
