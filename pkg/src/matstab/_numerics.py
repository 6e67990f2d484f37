"""Small numerical helpers: rank decisions and root clustering."""

from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree
from scipy.spatial.distance import pdist


def singular_values(M):
    M = np.asarray(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def rank_threshold(sv, p, tau, scale=0.0):
    """Cut-off below which a singular value is treated as zero."""
    if len(sv) == 0:
        return 0.0
    return tau * max(sv[0], scale) * p


def numerical_rank(M, tau, p=None, scale=0.0):
    """Rank of ``M`` with singular values below ``tau * max(sigma_max, scale) * p`` dropped.

    ``scale`` matters when ``M`` is itself the result of cancellation, e.g.
    ``F(lam)`` at a zero of ``F``: its own largest singular value may then be
    round-off, and the threshold must come from the size of the summed terms.

    Returns ``(rank, sv, threshold)``.
    """
    M = np.asarray(M)
    if p is None:
        p = max(1, min(M.shape)) if M.size else 1
    sv = singular_values(M)
    if len(sv) == 0 or max(sv[0], scale) == 0.0:
        return 0, sv, 0.0
    thr = rank_threshold(sv, p, tau, scale)
    return int(np.sum(sv > thr)), sv, thr


def hermitian_part(H):
    H = np.asarray(H, dtype=complex)
    return 0.5 * (H + H.conj().T)


def asymmetry(H):
    """Relative distance of ``H`` from its Hermitian part."""
    H = np.asarray(H, dtype=complex)
    if H.size == 0:
        return 0.0
    scale = np.linalg.norm(H, 2)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(H - H.conj().T, 2) / scale)


def _cluster_threshold(k, center, rtol, eta):
    scale = max(1.0, abs(center))
    return scale * max(rtol, eta ** (1.0 / k))


def _diameter(members):
    return float(np.max(np.abs(members[:, None] - members[None, :]))) if len(members) > 1 else 0.0


def cluster_roots(roots, rtol=1e-7, eta=1e-12):
    """Group numerically coincident roots.

    Single-linkage hierarchy, cut top-down: a subtree of ``k`` roots is kept
    as one multiple root once its diameter falls below the radius a
    ``k``-fold root can split into, otherwise it is split along its longest
    linkage edge.

    Returns a list of ``(centroid, multiplicity)`` sorted by real part then
    imaginary part.
    """
    roots = np.asarray(roots, dtype=complex).ravel()
    if len(roots) == 0:
        return []
    if len(roots) == 1:
        return [(complex(roots[0]), 1)]

    pts = np.column_stack([roots.real, roots.imag])
    tree = to_tree(linkage(pdist(pts), method="single"))

    groups = []
    stack = [tree]
    while stack:
        node = stack.pop()
        idx = node.pre_order()
        members = roots[idx]
        if len(idx) == 1:
            groups.append((complex(members[0]), 1))
            continue
        center = members.mean()
        diam = _diameter(members)
        # a split multiple root spreads evenly; two tight groups joined by an
        # edge far longer than either is wide are distinct roots
        floor = _cluster_threshold(2, center, rtol, eta)
        widths = [_diameter(roots[c.pre_order()]) for c in (node.get_left(), node.get_right())]
        gapped = node.dist > 100 * max(max(widths), floor)
        if diam <= _cluster_threshold(len(idx), center, rtol, eta) and not gapped:
            groups.append((complex(center), len(idx)))
        else:
            stack.extend([node.get_left(), node.get_right()])

    groups.sort(key=lambda g: (round(g[0].real, 12), round(g[0].imag, 12)))
    return groups
