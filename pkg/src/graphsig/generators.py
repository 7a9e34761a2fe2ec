"""Graph families: deterministic shapes, random models and point-cloud graphs.

All random families take a ``seed`` and draw every sample from
``numpy.random.default_rng(seed)``; the same seed therefore reproduces the
same graph bit for bit, and no global random state is touched.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.spatial import cKDTree

from .exceptions import (
    BadParameter,
    BadProbability,
    BlockSizeMismatch,
    DegenerateCloud,
    KTooLarge,
    PatchLargerThanImage,
    SizeTooSmall,
)
from .graphs import Graph, graph_from_weights


def _undirected(rows, cols, vals, n, **kwargs) -> Graph:
    """Assemble an undirected graph from one triangle of its edge list."""
    W = sp.coo_array((vals, (rows, cols)), shape=(n, n))
    W = sp.csr_array(W + W.T)
    return graph_from_weights(W, directed=False, **kwargs)


# ---------------------------------------------------------------------------
# Deterministic families
# ---------------------------------------------------------------------------

def ring(n: int) -> Graph:
    """Cycle on ``n >= 3`` vertices, unit weights, vertices on the unit circle."""
    if n < 3:
        raise SizeTooSmall(f"ring needs at least 3 vertices, got {n}")
    i = np.arange(n)
    theta = 2.0 * np.pi * i / n
    coords = np.column_stack([np.cos(theta), np.sin(theta)])
    return _undirected(i, (i + 1) % n, np.ones(n), n,
                       name=f"ring({n})", coords=coords)


def path(n: int) -> Graph:
    """Path on ``n >= 2`` vertices laid out on the x axis."""
    if n < 2:
        raise SizeTooSmall(f"path needs at least 2 vertices, got {n}")
    i = np.arange(n - 1)
    coords = np.column_stack([np.arange(n, dtype=float), np.zeros(n)])
    return _undirected(i, i + 1, np.ones(n - 1), n,
                       name=f"path({n})", coords=coords)


def comet(tail_length: int, star_degree: int) -> Graph:
    """Star of ``star_degree`` leaves with a path of ``tail_length`` attached.

    Vertex 0 is the center, vertices ``1..star_degree`` are the leaves, and
    the remaining vertices form the tail, walking away from the center.
    """
    if star_degree < 1:
        raise SizeTooSmall("comet needs star_degree >= 1")
    if tail_length < 0:
        raise BadParameter("comet tail_length must be >= 0")
    n = 1 + star_degree + tail_length
    if n < 2:
        raise SizeTooSmall("comet needs at least 2 vertices")
    rows = [np.zeros(star_degree, dtype=int)]
    cols = [np.arange(1, star_degree + 1)]
    if tail_length:
        t = np.arange(tail_length)
        tail = star_degree + 1 + t
        prev = np.concatenate([[0], tail[:-1]])
        rows.append(prev)
        cols.append(tail)
    # Leaves fan out on the left half circle, the tail runs along +x.
    coords = np.zeros((n, 2))
    ang = np.pi / 2 + np.pi * (np.arange(star_degree) + 1) / (star_degree + 1)
    coords[1:star_degree + 1, 0] = np.cos(ang)
    coords[1:star_degree + 1, 1] = np.sin(ang)
    if tail_length:
        coords[star_degree + 1:, 0] = np.arange(1, tail_length + 1)
    vals = np.ones(star_degree + tail_length)
    return _undirected(np.concatenate(rows), np.concatenate(cols), vals, n,
                       name=f"comet({tail_length},{star_degree})",
                       coords=coords)


def grid2d(rows: int, cols: int) -> Graph:
    """Four-connected ``rows x cols`` lattice with unit weights."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise SizeTooSmall(f"grid2d needs at least 2 vertices, got "
                           f"{rows}x{cols}")
    idx = np.arange(rows * cols).reshape(rows, cols)
    r_list, c_list = [], []
    if cols > 1:
        r_list.append(idx[:, :-1].ravel())
        c_list.append(idx[:, 1:].ravel())
    if rows > 1:
        r_list.append(idx[:-1, :].ravel())
        c_list.append(idx[1:, :].ravel())
    rr = np.concatenate(r_list)
    cc = np.concatenate(c_list)
    ii, jj = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    coords = np.column_stack([jj.ravel().astype(float),
                              (rows - 1 - ii).ravel().astype(float)])
    return _undirected(rr, cc, np.ones(rr.size), rows * cols,
                       name=f"grid2d({rows},{cols})", coords=coords)


# ---------------------------------------------------------------------------
# Random families
# ---------------------------------------------------------------------------

def _check_probability(p: float, label: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise BadProbability(f"{label} must lie in [0, 1], got {p}")
    return p


def erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """G(n, p): each of the n(n-1)/2 possible edges present with probability p."""
    if n < 2:
        raise SizeTooSmall(f"erdos_renyi needs at least 2 vertices, got {n}")
    p = _check_probability(p, "edge probability")
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    mask = rng.random(rows.size) < p
    return _undirected(rows[mask], cols[mask], np.ones(int(mask.sum())), n,
                       name=f"erdos_renyi({n},{p:g})")


def sbm(block_sizes, p_in: float, p_out: float, seed: int = 0,
        n: Optional[int] = None) -> Graph:
    """Stochastic block model.

    Args:
        block_sizes: Sequence of positive block sizes.
        p_in: Edge probability inside a block.
        p_out: Edge probability across blocks.
        seed: RNG seed.
        n: Optional total vertex count; must equal ``sum(block_sizes)``.

    Raises:
        BlockSizeMismatch: If ``n`` is given and disagrees with the sizes.
        BadProbability: If either probability is outside [0, 1].
    """
    sizes = [int(s) for s in block_sizes]
    if not sizes or any(s <= 0 for s in sizes):
        raise BadParameter(f"block sizes must be positive, got {sizes}")
    total = sum(sizes)
    if n is not None and n != total:
        raise BlockSizeMismatch(
            f"block sizes sum to {total}, but n={n} was requested")
    if total < 2:
        raise SizeTooSmall("sbm needs at least 2 vertices")
    p_in = _check_probability(p_in, "p_in")
    p_out = _check_probability(p_out, "p_out")
    labels = np.repeat(np.arange(len(sizes)), sizes)
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(total, k=1)
    prob = np.where(labels[rows] == labels[cols], p_in, p_out)
    mask = rng.random(rows.size) < prob
    return _undirected(rows[mask], cols[mask], np.ones(int(mask.sum())),
                       total, name=f"sbm({sizes},{p_in:g},{p_out:g})")


#: Default within-community edge probability for :func:`community`.
COMMUNITY_P_IN = 0.7
#: Default across-community edge probability for :func:`community`.
COMMUNITY_P_OUT = 0.02


def community(n: int, n_communities: int = 4, seed: int = 0,
              p_in: float = COMMUNITY_P_IN,
              p_out: float = COMMUNITY_P_OUT) -> Graph:
    """Clustered random graph: a block model with dense, near-equal blocks.

    ``n`` vertices are split into ``n_communities`` blocks whose sizes differ
    by at most one, wired with probability ``p_in`` inside a block and
    ``p_out`` across blocks.
    """
    if n_communities < 1:
        raise BadParameter("need at least one community")
    if n < 2:
        raise SizeTooSmall(f"community needs at least 2 vertices, got {n}")
    if n_communities > n:
        raise BadParameter(
            f"cannot split {n} vertices into {n_communities} communities")
    base = n // n_communities
    sizes = [base + (1 if i < n % n_communities else 0)
             for i in range(n_communities)]
    G = sbm(sizes, p_in, p_out, seed=seed)
    G.name = f"community({n},{n_communities})"
    return G


def sensor(n: int, seed: int = 0, k: int = 6) -> Graph:
    """Random sensor network: uniform points in the unit square, kNN edges."""
    if n < 2:
        raise SizeTooSmall(f"sensor needs at least 2 vertices, got {n}")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    G = nn_graph(pts, k=min(k, n - 1))
    G.name = f"sensor({n})"
    return G


def swiss_roll(n: int, seed: int = 0, noise: float = 0.0, k: int = 5) -> Graph:
    """Spiral sheet in 3-D, rescaled to unit radius, connected by kNN.

    The roll winds through 1.5 turns; ``noise`` is the standard deviation of
    Gaussian jitter added after rescaling.
    """
    if n < 2:
        raise SizeTooSmall(f"swiss_roll needs at least 2 vertices, got {n}")
    rng = np.random.default_rng(seed)
    t = 1.5 * np.pi * (1.0 + 2.0 * rng.random(n))
    height = rng.random(n)
    pts = np.column_stack([t * np.cos(t), height * 21.0, t * np.sin(t)])
    pts /= np.max(np.linalg.norm(pts, axis=1))
    if noise > 0:
        pts = pts + noise * rng.standard_normal(pts.shape)
    G = nn_graph(pts, k=min(k, n - 1))
    G.name = f"swiss_roll({n})"
    return G


def two_moons(n: int, seed: int = 0, noise: float = 0.05,
              radius: float = 1.0, k: int = 5) -> Graph:
    """Two interleaved half circles with Gaussian jitter, connected by kNN."""
    if n < 2:
        raise SizeTooSmall(f"two_moons needs at least 2 vertices, got {n}")
    if radius <= 0:
        raise BadParameter(f"radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    n_top = n // 2
    n_bot = n - n_top
    t_top = np.pi * rng.random(n_top)
    t_bot = np.pi * rng.random(n_bot)
    top = radius * np.column_stack([np.cos(t_top), np.sin(t_top)])
    bot = radius * np.column_stack([1.0 - np.cos(t_bot),
                                    0.5 - np.sin(t_bot)])
    pts = np.vstack([top, bot])
    if noise > 0:
        pts = pts + noise * rng.standard_normal(pts.shape)
    G = nn_graph(pts, k=min(k, n - 1))
    G.name = f"two_moons({n})"
    return G


# ---------------------------------------------------------------------------
# Point clouds and images
# ---------------------------------------------------------------------------

def _gaussian_knn_edges(features: np.ndarray, k: int, sigma: Optional[float]):
    """kNN edge list with Gaussian weights; returns (rows, cols, vals, sigma)."""
    m = features.shape[0]
    if k < 1:
        raise BadParameter(f"k must be >= 1, got {k}")
    if k >= m:
        raise KTooLarge(f"k={k} but there are only {m - 1} other points")
    tree = cKDTree(features)
    dist, idx = tree.query(features, k=k + 1)
    rows, cols, dists = [], [], []
    for i in range(m):
        nbrs = idx[i]
        dd = dist[i]
        keep = nbrs != i
        nbrs, dd = nbrs[keep][:k], dd[keep][:k]
        rows.append(np.full(nbrs.size, i))
        cols.append(nbrs)
        dists.append(dd)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    dists = np.concatenate(dists)
    if sigma is None:
        # Width from the data: mean distance to the k-th neighbour.  Every
        # row contributed exactly k entries, so the reshape is safe.
        kth = dists.reshape(m, k)[:, -1]
        sigma = float(kth.mean())
        if sigma <= 0:
            raise DegenerateCloud(
                "all neighbour distances are zero; give sigma explicitly")
    vals = np.exp(-(dists / sigma) ** 2)
    return rows, cols, vals, float(sigma)


def nn_graph(points, k: Optional[int] = None, epsilon: Optional[float] = None,
             sigma: Optional[float] = None, name: str = "") -> Graph:
    """Nearest-neighbour graph over a point cloud.

    Exactly one of ``k`` (symmetrized k-nearest-neighbour connectivity) or
    ``epsilon`` (all pairs within that radius) must be given.  Edge weights
    are ``exp(-dist^2 / sigma^2)``; when ``sigma`` is omitted it is inferred
    from the data (mean k-th-neighbour distance, or mean distance over the
    selected pairs in radius mode).

    The first two or three feature columns double as vertex coordinates.

    Raises:
        BadParameter: Neither or both of ``k`` / ``epsilon`` given.
        KTooLarge: ``k`` not smaller than the number of points.
        DegenerateCloud: Automatic ``sigma`` came out zero.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise BadParameter(f"points must be (M>=2, dim), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise BadParameter("points contain NaN or infinite entries")
    if (k is None) == (epsilon is None):
        raise BadParameter("give exactly one of k= or epsilon=")
    if sigma is not None and sigma <= 0:
        raise BadParameter(f"sigma must be positive, got {sigma}")
    m = pts.shape[0]

    if k is not None:
        rows, cols, vals, used_sigma = _gaussian_knn_edges(pts, int(k), sigma)
        W = sp.coo_array((vals, (rows, cols)), shape=(m, m)).tocsr()
        W = W.maximum(W.T)
    else:
        if epsilon <= 0:
            raise BadParameter(f"epsilon must be positive, got {epsilon}")
        tree = cKDTree(pts)
        pairs = tree.query_pairs(float(epsilon), output_type="ndarray")
        if pairs.size:
            dists = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
            if sigma is None:
                used_sigma = float(dists.mean())
                if used_sigma <= 0:
                    raise DegenerateCloud(
                        "all selected pair distances are zero; give sigma "
                        "explicitly")
            else:
                used_sigma = float(sigma)
            vals = np.exp(-(dists / used_sigma) ** 2)
            W = sp.coo_array((vals, (pairs[:, 0], pairs[:, 1])),
                             shape=(m, m)).tocsr()
            W = sp.csr_array(W + W.T)
        else:
            W = sp.csr_array((m, m))
            used_sigma = float(sigma) if sigma is not None else 0.0

    coords = pts[:, :3] if pts.shape[1] >= 3 else pts[:, :2]
    if pts.shape[1] < 2:
        coords = np.column_stack([pts[:, 0], np.zeros(m)])
    G = graph_from_weights(W, directed=False, name=name or f"nn_graph({m})",
                           coords=coords)
    G.plotting["sigma"] = used_sigma
    return G


def patch_graph(image, patch_size: int = 5, k: int = 10,
                sigma: Optional[float] = None,
                search_window: Optional[int] = None) -> Graph:
    """Non-local-means style pixel graph of an image.

    Every pixel becomes a vertex whose feature vector is the flattened
    ``patch_size x patch_size`` patch around it (symmetric padding at the
    borders).  Vertices are wired to their ``k`` nearest neighbours in patch
    space with Gaussian weights.  With ``search_window`` set, pixel positions
    scaled by ``sqrt(patch_dim) / search_window`` are appended to the
    features, so that a displacement of one window length costs as much as a
    full-contrast patch difference and far-away matches are suppressed.

    Args:
        image: 2-D grayscale or 3-D (H, W, channels) array.
        patch_size: Odd patch side, at least 1.
        k: Neighbours per pixel.
        sigma: Gaussian width; inferred from the data when omitted.
        search_window: Optional locality scale in pixels.

    Returns:
        Undirected graph with one vertex per pixel; coordinates are pixel
        positions (column, row-from-bottom) so exports match the image.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim == 2:
        img = img[:, :, None]
    if img.ndim != 3:
        raise BadParameter(f"image must be 2-D or 3-D, got shape {img.shape}")
    h, w, ch = img.shape
    if patch_size < 1 or patch_size % 2 == 0:
        raise BadParameter(f"patch_size must be odd and >= 1, got {patch_size}")
    if patch_size > h or patch_size > w:
        raise PatchLargerThanImage(
            f"patch {patch_size}x{patch_size} does not fit in a "
            f"{h}x{w} image")
    if search_window is not None and search_window <= 0:
        raise BadParameter("search_window must be positive")

    pad = patch_size // 2
    padded = np.pad(img, ((pad, pad), (pad, pad), (0, 0)), mode="symmetric")
    windows = np.lib.stride_tricks.sliding_window_view(
        padded, (patch_size, patch_size), axis=(0, 1))
    feats = windows.reshape(h * w, ch * patch_size * patch_size)

    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    if search_window is not None:
        scale = np.sqrt(feats.shape[1]) / float(search_window)
        feats = np.column_stack([feats,
                                 scale * cc.ravel(), scale * rr.ravel()])

    rows, cols, vals, used_sigma = _gaussian_knn_edges(
        np.ascontiguousarray(feats), int(k), sigma)
    W = sp.coo_array((vals, (rows, cols)), shape=(h * w, h * w)).tocsr()
    W = W.maximum(W.T)
    coords = np.column_stack([cc.ravel().astype(float),
                              (h - 1 - rr).ravel().astype(float)])
    G = graph_from_weights(W, directed=False, coords=coords,
                           name=f"patch_graph({h}x{w})")
    G.plotting["sigma"] = used_sigma
    return G
