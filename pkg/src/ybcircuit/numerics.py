"""Dense complex linear algebra used throughout the package.

Defective eigenvalues of non-normal matrices are computed by LAPACK with an
error of order eps**(1/k) for a k x k Jordan block, so the raw diagonal of a
Schur form scatters such an eigenvalue over a small polygon.  The mean of the
polygon is accurate to machine precision, which is what
``eigenvalues_schur`` returns by default.
"""

import itertools

import numpy as np
import scipy.linalg as sla
from scipy.cluster.hierarchy import fcluster, linkage, to_tree

from .errors import ContractShapeError, NumericalFailure

# symmetric-function threshold separating one smeared eigenvalue from several
DEFECT_TOL = 1e-12


def _as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def contract(a, b, pairs):
    """Sum over paired legs of two tensors.

    ``pairs`` is a list of ``(leg_of_a, leg_of_b)``.  The result carries the
    free legs of ``a`` followed by the free legs of ``b``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    axes_a = [p[0] for p in pairs]
    axes_b = [p[1] for p in pairs]
    for i, j in pairs:
        if a.shape[i] != b.shape[j]:
            raise ContractShapeError(
                f"leg {i} of a has dim {a.shape[i]}, leg {j} of b has dim {b.shape[j]}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def mat_power(a, k):
    """k-fold matrix product, identity for k = 0."""
    a = _as_matrix(a)
    if k < 0:
        raise ValueError("k must be non-negative")
    return np.linalg.matrix_power(a, int(k))


def schur(a):
    """Complex Schur form ``a = Z T Z^H``."""
    a = _as_matrix(a)
    if not np.all(np.isfinite(a)):
        raise NumericalFailure("non-finite entries", {"shape": a.shape})
    try:
        T, Z = sla.schur(a, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"Schur iteration failed: {exc}", {"shape": a.shape}) from exc
    return T, Z


def _one_eigenvalue(w, scale, tol):
    """True if the points w look like one eigenvalue smeared by rounding.

    For a perturbed k x k Jordan block the deviations from the mean are the
    k-th roots of a tiny number, so every elementary symmetric function of
    the deviations of order >= 2 is tiny, while for distinct eigenvalues the
    second one is of order (gap)^2.
    """
    if len(w) < 2:
        return True
    c = np.poly(w - w.mean())[2:]
    powers = scale ** np.arange(2, len(w) + 1)
    return bool(np.all(np.abs(c) <= tol * powers))


# failing dendrogram nodes up to this size are searched exhaustively
PEEL_MAX = 14


def _peel(w, scale, tol):
    """Split w by repeatedly removing the largest subset that passes the test.

    Handles a distinct eigenvalue sitting inside the smear circle of a large
    Jordan block, which no linkage split can separate.
    """
    left = list(range(len(w)))
    groups = []
    while left:
        for k in range(len(left), 0, -1):
            combos = np.array(list(itertools.combinations(left, k)))
            pts = w[combos]
            dev = pts - pts.mean(axis=1, keepdims=True)
            # e_2 of zero-mean deviations is -sum(dev**2) / 2; cheap prefilter
            cheap = np.abs(np.sum(dev**2, axis=1)) <= 2 * tol * scale**2 if k > 1 else np.ones(len(combos), bool)
            hit = next((c for c in combos[cheap] if _one_eigenvalue(w[c], scale, tol)), None)
            if hit is not None:
                groups.append(hit)
                left = [i for i in left if i not in hit]
                break
    return groups


def defect_groups(d, scale=1.0, tol=DEFECT_TOL):
    """Partition eigenvalue estimates into groups of one exact eigenvalue each.

    Top-down walk of the single-linkage dendrogram: a node is kept when its
    leaves pass the symmetric-function test.  A failing node is split at its
    largest link, unless it is small enough to be peeled exhaustively.
    """
    d = np.asarray(d, dtype=complex)
    n = len(d)
    if n == 0:
        return []
    if n == 1:
        return [np.array([0])]
    scale = max(float(scale), np.finfo(float).tiny)
    root = to_tree(linkage(np.c_[d.real, d.imag], "single"))
    groups = []
    stack = [root]
    while stack:
        node = stack.pop()
        idx = np.array(node.pre_order())
        if node.is_leaf() or _one_eigenvalue(d[idx], scale, tol):
            groups.append(np.sort(idx))
        elif len(idx) <= PEEL_MAX:
            groups.extend(np.sort(idx[g]) for g in _peel(d[idx], scale, tol))
        else:
            stack.extend([node.right, node.left])
    groups.sort(key=lambda g: (d[g].mean().real, d[g].mean().imag))
    return groups


def eigenvalues_schur(a, refine=True):
    """All eigenvalues with multiplicity from the complex Schur form.

    With ``refine`` each group of Schur diagonal entries belonging to one
    defective eigenvalue is replaced by its mean; the trace is unchanged.
    """
    a = _as_matrix(a)
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    T, _ = schur(a)
    d = np.diag(T).copy()
    if refine:
        scale = np.linalg.norm(a, 2)
        for g in defect_groups(d, scale):
            d[g] = d[g].mean()
    return d


def reorder_schur(T, Z, select):
    """Move the selected Schur diagonal entries to the leading block."""
    select = np.asarray(select, dtype=np.int32)
    ztrsen = sla.get_lapack_funcs("trsen", (T,))
    Ts, Zs, w, k, _, _, info = ztrsen(select, T, Z, job="N")
    if info != 0:
        raise NumericalFailure("Schur reordering failed", {"info": int(info)})
    return Ts, Zs, int(k)


def numerical_rank(a, rel_tol=1e-8, scale=None):
    """Count singular values above ``rel_tol`` times a reference.

    The reference is the largest singular value unless ``scale`` is given.
    """
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if a.size == 0:
        return 0
    s = sla.svdvals(a)
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > rel_tol * ref))


def cluster_eigenvalues(vals, tol):
    """Single-linkage clusters within ``tol``, as (mean, multiplicity) pairs."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    vals = np.asarray(vals, dtype=complex).ravel()
    if len(vals) == 0:
        return []
    if len(vals) == 1:
        return [(complex(vals[0]), 1)]
    labels = fcluster(linkage(np.c_[vals.real, vals.imag], "single"), tol, "distance")
    out = []
    for lab in np.unique(labels):
        members = vals[labels == lab]
        out.append((complex(members.mean()), len(members)))
    out.sort(key=lambda p: (p[0].real, p[0].imag))
    return out


def default_cluster_tol(vals, rel=1e-8):
    """Clustering tolerance scaled by the spectral radius."""
    vals = np.asarray(vals)
    radius = np.abs(vals).max() if vals.size else 0.0
    return rel * radius if radius > 0 else rel
