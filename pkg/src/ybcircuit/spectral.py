"""Spectral analysis of the non-Hermitian transfer matrices.

Jordan structure is read off from ranks of powers of the nilpotent part of
each eigenvalue's Schur block; no similarity to Jordan form is built.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from .bethe import BetheRootSet, bethe_eigenvalue, newton
from .errors import ClassificationError, ContinuationError
from .numerics import (
    cluster_eigenvalues,
    defect_groups,
    eigenvalues_schur,
    numerical_rank,
    reorder_schur,
    schur,
)
from .transfer import (
    TransferMatrix,
    boundary_vector,
    build_monodromy,
    build_transfer,
    pseudo_vacuum,
    swap_unitary,
)


def commutator_residual(a, b):
    a = getattr(a, "matrix", a)
    b = getattr(b, "matrix", b)
    return float(np.abs(a @ b - b @ a).max())


def check_commuting_family(m, lambdas, eps=None, eps_per_lambda=None):
    """Largest pairwise max-norm commutator over a grid of spectral parameters.

    ``eps_per_lambda`` gives each matrix its own inhomogeneities, which is
    the negative control: commutation needs identical eps.
    """
    if eps_per_lambda is None:
        eps_per_lambda = [eps] * len(lambdas)
    mats = [build_transfer(m, lam, e).matrix for lam, e in zip(lambdas, eps_per_lambda)]
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            worst = max(worst, commutator_residual(mats[i], mats[j]))
    return worst


@dataclass(frozen=True)
class JordanEntry:
    value: complex
    multiplicity: int
    weyr: tuple
    blocks: tuple


@dataclass
class JordanReport:
    entries: list
    rank_tol: float
    stable: bool = True
    unstable: list = field(default_factory=list)

    def find(self, value, tol=1e-8):
        hits = [e for e in self.entries if abs(e.value - value) <= tol]
        return hits[0] if len(hits) == 1 else None

    @property
    def dimension(self):
        return sum(e.multiplicity for e in self.entries)


def _eigen_blocks(a, cluster_rel=1e-8):
    """Schur form plus index groups of the diagonal, one per distinct eigenvalue."""
    T, Z = schur(a)
    d = np.diag(T)
    scale = np.linalg.norm(a, 2)
    groups = defect_groups(d, scale)
    means = np.array([d[g].mean() for g in groups])
    tol = cluster_rel * max(np.abs(means).max(), 1.0) if len(means) else cluster_rel
    # merge groups whose refined values agree
    merged = []
    for mean, g in sorted(zip(means, groups), key=lambda p: (p[0].real, p[0].imag)):
        if merged and abs(merged[-1][0] - mean) <= tol:
            idx = np.concatenate([merged[-1][1], g])
            merged[-1] = (d[idx].mean(), idx)
        else:
            merged.append((mean, g))
    return T, Z, scale, merged


def _leading_block(T, Z, idx):
    select = np.zeros(T.shape[0], dtype=np.int32)
    select[idx] = 1
    Ts, Zs, k = reorder_schur(T, Z, select)
    return Ts[:k, :k], Zs[:, :k]


def _weyr(block, value, rank_tol, scale):
    s = block.shape[0]
    N = block - value * np.eye(s)
    nullities = [0]
    P = np.eye(s, dtype=complex)
    for k in range(1, s + 1):
        P = P @ N
        nullities.append(s - numerical_rank(P, rank_tol, scale=scale**k))
        if nullities[-1] >= s or nullities[-1] == nullities[-2]:
            break
    return tuple(np.diff(nullities)), nullities[-1] == s


def _blocks_from_weyr(weyr):
    w = list(weyr) + [0]
    sizes = []
    for k in range(len(weyr)):
        sizes += [k + 1] * (w[k] - w[k + 1])
    return tuple(sorted(sizes, reverse=True))


def _jordan_once(T, Z, scale, groups, rank_tol):
    entries, complete = [], True
    for value, idx in groups:
        block, _ = _leading_block(T, Z, idx)
        weyr, full = _weyr(block, value, rank_tol, scale)
        complete &= full
        blocks = _blocks_from_weyr(weyr) if full else ()
        entries.append(JordanEntry(complex(value), len(idx), weyr, blocks))
    return entries, complete


def jordan_structure(tm, rank_tol=1e-8):
    """Per-eigenvalue Weyr characteristic and Jordan block sizes.

    The analysis is repeated at rank_tol * 10 and rank_tol / 10; entries that
    change are listed in ``unstable`` and clear the ``stable`` flag.
    """
    a = tm.matrix if isinstance(tm, TransferMatrix) else np.asarray(tm, dtype=complex)
    if a.shape[0] > 256:
        raise ValueError("Jordan analysis is limited to dimension 256")
    T, Z, scale, groups = _eigen_blocks(a)
    entries, complete = _jordan_once(T, Z, scale, groups, rank_tol)
    report = JordanReport(entries, rank_tol, complete)
    for tol in (rank_tol * 10, rank_tol / 10):
        other, ok = _jordan_once(T, Z, scale, groups, tol)
        for e, o in zip(entries, other):
            if e.blocks != o.blocks or not ok:
                report.stable = False
                if e.value not in report.unstable:
                    report.unstable.append(e.value)
    if not complete:
        report.stable = False
    return report


@dataclass(frozen=True)
class Su2Generators:
    Sx: np.ndarray
    Sy: np.ndarray
    Sz: np.ndarray
    S2: np.ndarray

    @property
    def Splus(self):
        return self.Sx + 1j * self.Sy

    @property
    def Sminus(self):
        return self.Sx - 1j * self.Sy


# single qubit spin operators with |0> = down, |1> = up
_SX = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
_SY = np.array([[0, 0.5j], [-0.5j, 0]], dtype=complex)
_SZ = np.array([[-0.5, 0], [0, 0.5]], dtype=complex)


def _site_sum(op, nlegs, signs):
    total = np.zeros((2**nlegs, 2**nlegs), dtype=complex)
    for leg, sign in enumerate(signs):
        total += sign * np.kron(np.kron(np.eye(2**leg), op), np.eye(2 ** (nlegs - leg - 1)))
    return total


def su2_generators(m):
    """Symmetry generators on the folded space; the two halves enter with
    the signs that make tau commute with them."""
    if m < 1:
        raise ValueError("m must be at least 1")
    nl = 2 * m
    sz = _site_sum(_SZ, nl, [1] * m + [-1] * m)
    sx = _site_sum(_SX, nl, [-1] * m + [1] * m)
    sy = _site_sum(_SY, nl, [-1] * m + [-1] * m)
    return Su2Generators(sx, sy, sz, sx @ sx + sy @ sy + sz @ sz)


def su2_algebra_residual(gens):
    c = lambda a, b: a @ b - b @ a
    res = [
        c(gens.Sx, gens.Sy) - 1j * gens.Sz,
        c(gens.Sy, gens.Sz) - 1j * gens.Sx,
        c(gens.Sz, gens.Sx) - 1j * gens.Sy,
    ]
    return float(max(np.abs(r).max() for r in res))


def spin_from_casimir(x):
    return (-1 + np.sqrt(1 + 4 * x.real)) / 2


@lru_cache(maxsize=None)
def lowest_weight_bases(m):
    """Orthonormal bases of the lowest-weight vectors of each total spin.

    Returns (S, embedding) pairs; the embedding is 4^m x n_S and its range is
    annihilated by the lowering generator with S^z = -S.
    """
    g = su2_generators(m)
    sz = np.real(np.diag(g.Sz))
    out = []
    for S in range(m + 1):
        idx = np.where(np.isclose(sz, -S))[0]
        Q = sla.null_space(g.Sminus[:, idx])
        P = np.zeros((4**m, Q.shape[1]), dtype=complex)
        P[idx] = Q
        out.append((S, P))
    return tuple(out)


def sector_eigenvalues(tm):
    """Eigenvalues with multiplicity, computed spin sector by spin sector.

    Each spin-S block is diagonalized once and repeated 2S+1 times.  Smaller
    blocks keep the rounding smear of defective eigenvalues from swallowing
    nearby eigenvalues of other spins.
    """
    if tm.kind != "correlation":
        return eigenvalues_schur(tm.matrix)
    vals = []
    for S, P in lowest_weight_bases(tm.m):
        if P.shape[1]:
            block = P.conj().T @ tm.matrix @ P
            vals.append(np.repeat(eigenvalues_schur(block), 2 * S + 1))
    return np.concatenate(vals)


def multiplet_table(tm, gens=None, tol=1e-6):
    """(eigenvalue, total spin, degeneracy) for every eigenvalue cluster.

    The Casimir is restricted to each generalized eigenspace, which it
    leaves invariant because it commutes with tau.
    """
    a = tm.matrix if isinstance(tm, TransferMatrix) else np.asarray(tm, dtype=complex)
    m = int(round(np.log(a.shape[0]) / np.log(4)))
    gens = gens or su2_generators(m)
    T, Z, _, groups = _eigen_blocks(a)
    rows = []
    for value, idx in groups:
        _, Q = _leading_block(T, Z, idx)
        c = Q.conj().T @ gens.S2 @ Q
        casimir = np.linalg.eigvalsh(0.5 * (c + c.conj().T))
        spins = spin_from_casimir(casimir)
        rounded = np.round(spins).astype(int)
        if np.max(np.abs(spins - rounded), initial=0.0) > tol:
            raise ClassificationError(f"non-integral spin content at eigenvalue {value}")
        for S in sorted(set(rounded.tolist())):
            deg = int(np.sum(rounded == S))
            if deg % (2 * S + 1):
                raise ClassificationError(f"{deg} states of spin {S} at eigenvalue {value}")
            rows.append((complex(value), S, deg))
    rows.sort(key=lambda r: (r[0].real, r[0].imag, r[1]))
    return rows


@dataclass
class NestingReport:
    lam: float
    worst: dict
    missing: dict

    @property
    def ok(self):
        return not any(self.missing.values())


def nested_in(inner, outer, tol=1e-8):
    """Distances and failures for matching each inner cluster in ``outer``.

    Returns (worst distance, list of unmatched (value, multiplicity)).
    """
    outer = np.asarray(outer)
    worst, missing = 0.0, []
    radius = max(np.abs(inner).max(initial=0.0), 1.0)
    for value, mult in cluster_eigenvalues(inner, tol * radius):
        dist = np.abs(outer - value)
        worst = max(worst, float(np.sort(dist)[mult - 1]))
        if np.sum(dist <= tol * radius) < mult:
            missing.append((value, mult))
    return worst, missing


def nesting_check(m_max, lam, tol=1e-8, spectra=None):
    """Check that every tau_n spectrum sits inside tau_{n+1}, n < m_max."""
    if m_max > 4:
        raise ValueError("m_max is capped at 4")
    spectra = spectra or {m: sector_eigenvalues(build_transfer(m, lam)) for m in range(1, m_max + 1)}
    worst, missing = {}, {}
    for n in range(1, m_max):
        worst[n], missing[n] = nested_in(spectra[n], spectra[n + 1], tol)
    rep = NestingReport(float(lam), worst, missing)
    return rep.ok, rep


def _split_eps(m, n, delta):
    eps = np.zeros(m)
    eps[n - 1] = delta / 2
    eps[n] = -delta / 2
    return eps


def _continued_roots(rootset, eps_sub):
    if rootset.N == 0:
        return BetheRootSet(rootset.n, (), tuple(eps_sub), 0.0)
    x, resid = newton(np.array(rootset.roots), eps_sub)
    if not resid <= 1e-9 or np.max(np.abs(x - np.array(rootset.roots))) > 0.5:
        raise ContinuationError(f"Bethe roots lost at eps={eps_sub}")
    return BetheRootSet(rootset.n, tuple(x), tuple(eps_sub), resid)


def _split_state(m, rootset, lam, delta):
    """Bethe state, eigenvalue and rotated state at split inhomogeneities."""
    n = rootset.n
    eps = _split_eps(m, n, delta)
    rs = _continued_roots(rootset, eps[:n])
    v = pseudo_vacuum(m, n)
    for x in rs.roots:
        v = build_monodromy(m, x, eps).B @ v
    half = np.zeros(m)
    half[n - 1] = delta / 2  # swap unitary with half the splitting
    U = swap_unitary(m, n - 1, half)
    return v, bethe_eigenvalue(lam, rs), U.conj().T @ v


def generalized_eigenvector(m, rootset, delta=1e-3, lam=1.0):
    """First generalized eigenvector from splitting one boundary pair.

    Site n (uncontracted) and site n+1 (contracted) get eps = +-delta/2.
    v is the central difference of U(delta/2)^dag |psi(delta)> at delta = 0
    and should satisfy (tau - t) v = t' |psi(0)>.  Returns (v, residual,
    info) with the residual relative to |v|.
    """
    n = rootset.n
    if not 1 <= n < m:
        raise ValueError("need 1 <= n < m to split an uncontracted and a contracted site")
    tau = build_transfer(m, lam).matrix
    psi0, t0, _ = _split_state(m, rootset, lam, 0.0)
    if delta == 0:
        r = np.linalg.norm(tau @ psi0 - t0 * psi0) / np.linalg.norm(psi0)
        return psi0, float(r), {"t": t0, "dt": 0.0}
    _, tp, fp = _split_state(m, rootset, lam, delta)
    _, tm, fm = _split_state(m, rootset, lam, -delta)
    v = (fp - fm) / (2 * delta)
    dt = (tp - tm) / (2 * delta)
    r = np.linalg.norm((tau - t0 * np.eye(len(v))) @ v - dt * psi0) / np.linalg.norm(v)
    return v, float(r), {"t": t0, "dt": dt, "psi0": psi0}


def richardson_order(m, rootset, deltas=(1e-2, 1e-3), lam=1.0):
    """Residuals at two steps and the empirical convergence order."""
    res = [generalized_eigenvector(m, rootset, d, lam)[1] for d in deltas]
    order = np.log(res[0] / res[1]) / np.log(deltas[0] / deltas[1])
    return res, float(order)


def spectral_radius(tm):
    a = tm.matrix if isinstance(tm, TransferMatrix) else tm
    return float(np.abs(eigenvalues_schur(a)).max())


def boundary_spin(m, alpha="z"):
    """S^2 expectation of a ket boundary vector."""
    v = boundary_vector(m, alpha, "ket")
    return complex(np.vdot(v, su2_generators(m).S2 @ v))
