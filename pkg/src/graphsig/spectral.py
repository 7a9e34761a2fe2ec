"""Eigendecomposition, graph Fourier transform and vertex-domain localization.

The full eigendecomposition is dense work and is gated by a vertex cap
(:data:`DEFAULT_DENSE_CAP`, overridable through the ``GRAPHSIG_DENSE_CAP``
environment variable).  Pipelines that only need a spectral-radius bound can
use :func:`estimate_lmax`, which is a cheap Lanczos pass.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spl

from .exceptions import (
    GraphTooLargeForDense,
    IndexOutOfRange,
    MissingFourierBasis,
    MissingLmax,
    NonSymmetricLaplacian,
    ShapeMismatch,
)
from .graphs import Graph

#: Largest vertex count for which a dense eigendecomposition is attempted.
DEFAULT_DENSE_CAP = 3000

#: Environment variable overriding :data:`DEFAULT_DENSE_CAP`.
DENSE_CAP_ENV = "GRAPHSIG_DENSE_CAP"

#: Safety factor applied to the Lanczos spectral-radius estimate.
LMAX_SAFETY = 1.01

_SIGN_EPS = 1e-8


def _lanczos_start(n: int) -> np.ndarray:
    """Deterministic Lanczos start vector.

    A ramp rather than a constant: the constant vector is the null
    eigenvector of every combinatorial Laplacian, which would start the
    iteration with zero overlap on the wanted top eigenspace.  Using a fixed
    vector keeps results reproducible and leaves the global RNG untouched.
    """
    v = np.arange(1.0, n + 1.0)
    return v / np.linalg.norm(v)


def dense_cap() -> int:
    """Current dense-solve vertex cap (environment override wins)."""
    raw = os.environ.get(DENSE_CAP_ENV)
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError as exc:
        raise GraphTooLargeForDense(
            f"{DENSE_CAP_ENV}={raw!r} is not an integer") from exc


@dataclass
class SpectralData:
    """Eigendecomposition of a graph's active Laplacian.

    Attributes:
        U: Orthonormal eigenvectors, one per column, in eigenvalue order and
            with a deterministic sign (first entry of magnitude above 1e-8 in
            each column is positive).
        e: Eigenvalues in nondecreasing order.
        lmax: Largest eigenvalue.
        exact_lmax: True here (the bound came from a full decomposition); the
            Lanczos path stores its estimate on the graph instead.
        mu: Coherence, the largest absolute entry of ``U``.
    """

    U: np.ndarray
    e: np.ndarray
    lmax: float
    exact_lmax: bool
    mu: float


def _fix_signs(U: np.ndarray) -> np.ndarray:
    """Flip eigenvector columns so their leading significant entry is >= 0."""
    for j in range(U.shape[1]):
        col = U[:, j]
        nz = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if nz.size and col[nz[0]] < 0:
            U[:, j] = -col
    return U


def compute_fourier_basis(G: Graph) -> SpectralData:
    """Full symmetric eigendecomposition of the graph's active Laplacian.

    The result is cached on the graph; repeated calls return the same object.
    Swapping the Laplacian with :func:`graphsig.graphs.laplacian` clears the
    cache.

    Raises:
        GraphTooLargeForDense: More vertices than the dense cap allows.
        NonSymmetricLaplacian: The active Laplacian is not symmetric (for
            example the degree-normalized directed form).
    """
    if G._spectral is not None:
        return G._spectral
    cap = dense_cap()
    if G.N > cap:
        raise GraphTooLargeForDense(
            f"graph has {G.N} vertices, dense cap is {cap} "
            f"(override with {DENSE_CAP_ENV})")
    Ld = G.L.toarray()
    scale = max(1.0, float(np.max(np.abs(Ld))) if Ld.size else 0.0)
    if np.max(np.abs(Ld - Ld.T)) > 1e-10 * scale:
        raise NonSymmetricLaplacian(
            f"active laplacian ({G.lap_kind.value}) is not symmetric; "
            "no orthonormal Fourier basis exists")
    e, U = np.linalg.eigh((Ld + Ld.T) * 0.5)
    U = _fix_signs(U)
    data = SpectralData(U=U, e=e, lmax=float(e[-1]), exact_lmax=True,
                        mu=float(np.max(np.abs(U))))
    G._spectral = data
    return data


def estimate_lmax(G: Graph) -> float:
    """Upper bound on the largest Laplacian eigenvalue, cached on the graph.

    Runs a coarse Lanczos iteration and inflates the result by 1 percent so
    the bound errs on the large side, which is what polynomial filtering
    needs.  If Lanczos fails to converge, the Gershgorin row bound is used
    instead.  When the exact decomposition is already available its top
    eigenvalue wins.
    """
    if G._spectral is not None:
        return G._spectral.lmax
    if G._lmax_estimate is not None:
        return G._lmax_estimate

    if G.N <= 2:
        ev = np.linalg.eigvalsh(G.L.toarray())
        est = LMAX_SAFETY * float(ev[-1])
    else:
        try:
            val = spl.eigsh(G.L.astype(float), k=1, which="LA",
                            return_eigenvectors=False, tol=1e-6,
                            ncv=min(G.N, 20), v0=_lanczos_start(G.N))
            est = LMAX_SAFETY * float(val[0])
        except (spl.ArpackError, spl.ArpackNoConvergence):
            # Gershgorin: every eigenvalue lies within the largest absolute
            # row sum, which is always an upper bound for symmetric L.
            Labs = abs(G.L)
            est = float(np.max(Labs.sum(axis=1)))
    est = max(est, 0.0)
    G._lmax_estimate = est
    return est


def get_lmax(G: Graph, required_by: str = "this operation") -> float:
    """Best available spectral-radius bound, exact over estimated.

    Raises:
        MissingLmax: Neither the Fourier basis nor an estimate exists.
    """
    if G._spectral is not None:
        return G._spectral.lmax
    if G._lmax_estimate is not None:
        return G._lmax_estimate
    raise MissingLmax(
        f"{required_by} needs a spectral-radius bound; call "
        "estimate_lmax() or compute_fourier_basis() first")


def get_spectral(G: Graph, required_by: str = "this operation") -> SpectralData:
    """Cached eigendecomposition, raising if it has not been computed."""
    if G._spectral is None:
        raise MissingFourierBasis(
            f"{required_by} needs the Fourier basis; call "
            "compute_fourier_basis() first")
    return G._spectral


def _check_signal(G: Graph, f, label: str = "signal") -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.ndim not in (1, 2) or arr.shape[0] != G.N:
        raise ShapeMismatch(
            f"{label} must have {G.N} rows, got shape {arr.shape}")
    return arr


def gft(G: Graph, f) -> np.ndarray:
    """Graph Fourier transform: project a signal onto the eigenbasis.

    Accepts a single signal or a matrix of column signals; shape is
    preserved.
    """
    S = get_spectral(G, "gft")
    return S.U.T @ _check_signal(G, f)


def igft(G: Graph, f_hat) -> np.ndarray:
    """Inverse graph Fourier transform."""
    S = get_spectral(G, "igft")
    return S.U @ _check_signal(G, f_hat, "spectrum")


def localize(G: Graph, kernel, i: int, order: int = 30) -> np.ndarray:
    """Translate a spectral kernel to vertex ``i``.

    Returns ``sqrt(N)`` times the kernel filtered impulse at ``i``.  Uses the
    exact eigenbasis when it is cached, otherwise falls back to Chebyshev
    filtering of the impulse (needs a spectral-radius bound).

    Raises:
        IndexOutOfRange: ``i`` is not a vertex.
        MissingFourierBasis: Neither basis nor spectral-radius bound exists.
    """
    if not 0 <= int(i) < G.N:
        raise IndexOutOfRange(f"vertex {i} outside [0, {G.N})")
    i = int(i)
    root_n = np.sqrt(G.N)
    if G._spectral is not None:
        S = G._spectral
        return root_n * (S.U @ (np.asarray(kernel(S.e)) * S.U[i, :]))
    if G._lmax_estimate is None:
        raise MissingFourierBasis(
            "localize needs the Fourier basis or a spectral-radius bound; "
            "call compute_fourier_basis() or estimate_lmax() first")
    from .filters import chebyshev_apply, chebyshev_coeffs
    coeffs = chebyshev_coeffs(kernel, order, G._lmax_estimate)
    impulse = np.zeros(G.N)
    impulse[i] = 1.0
    return root_n * chebyshev_apply(G, coeffs, impulse)
