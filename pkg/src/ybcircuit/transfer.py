"""Correlation and OTOC transfer matrices of the brickwork circuit.

Folded vectors live on 2m qubit legs ordered left to right: legs 1..m come
from the adjoint circuit, legs m+1..2m from the forward circuit.  Leg 1 is
the most significant bit of the flat index.

Inhomogeneities follow the mirror pairing: the adjoint column k carries
eps_k and the forward column m+j carries eps_{m-j+1}, so legs k and 2m+1-k
share eps_k.
"""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ResourceError
from .gates import SWAP, pauli, r_matrix
from .numerics import mat_power

MAX_M = {"correlation": 4, "otoc": 2}
# B(0) maps |0_{m,n}> to this multiple of |0_{m,n-1}>
VACUUM_DESCENT_SCALAR = np.sqrt(2.0)


@dataclass(frozen=True)
class Monodromy:
    m: int
    lam: complex
    eps: tuple
    tensor: np.ndarray  # [a_in, a_out, I, J]

    @property
    def A(self):
        return self.tensor[0, 0]

    @property
    def B(self):
        return self.tensor[0, 1]

    @property
    def C(self):
        return self.tensor[1, 0]

    @property
    def D(self):
        return self.tensor[1, 1]


@dataclass(frozen=True)
class TransferMatrix:
    m: int
    lam: complex
    eps: tuple
    kind: str
    matrix: np.ndarray
    normalized: bool = True

    @property
    def dim(self):
        return self.matrix.shape[0]


def _check_size(m, kind):
    if kind not in MAX_M:
        raise ValueError(f"unknown kind {kind!r}")
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > MAX_M[kind]:
        raise ResourceError(f"{kind} transfer matrix capped at m={MAX_M[kind]}, got {m}")


def _eps(m, eps):
    if eps is None:
        return (0.0,) * m
    eps = tuple(float(e) for e in eps)
    if len(eps) != m:
        raise ValueError(f"need {m} inhomogeneities, got {len(eps)}")
    return eps


def _columns(m, lam, eps):
    """Local MPO tensors W[a, b, i, j] of the 2m columns."""
    cols = []
    for k in range(m):
        r = r_matrix(-(lam - eps[k])).reshape(2, 2, 2, 2)  # [a, i, j, b]
        cols.append(np.einsum("aijb->abij", r))
    for j in range(m):
        r = r_matrix(lam - eps[m - 1 - j]).reshape(2, 2, 2, 2)  # [j, a, b, i]
        cols.append(np.einsum("jabi->abij", r))
    return cols


def _chain(cols):
    T = cols[0]
    for W in cols[1:]:
        T = np.einsum("abIJ,bcij->acIiJj", T, W)
        s = T.shape
        T = T.reshape(s[0], s[1], s[2] * s[3], s[4] * s[5])
    return T


def build_monodromy(m, lam, eps=None, kind="correlation"):
    """Monodromy with the auxiliary index open at both ends.

    ``lam`` may be complex, which is needed for Bethe creation operators.
    """
    _check_size(m, kind)
    eps = _eps(m, eps)
    T = _chain(_columns(m, lam, eps))
    if kind == "otoc":
        d = T.shape[2]
        T = np.einsum("acIJ,cbKL->abIKJL", T, T).reshape(2, 2, d * d, d * d)
    return Monodromy(m, lam, eps, T)


def build_transfer(m, lam, eps=None, kind="correlation"):
    """Half the auxiliary trace of the monodromy."""
    mono = build_monodromy(m, lam, eps, kind)
    matrix = 0.5 * (mono.A + mono.D)
    return TransferMatrix(m, lam, mono.eps, kind, matrix, True)


def rainbow(nlegs, arcs=None):
    """Unnormalized nested arcs pairing leg k with leg nlegs-1-k (0-based).

    ``arcs`` maps an outer leg k to a 2x2 matrix M placed as M[i_k, i_mirror];
    other arcs carry the identity.
    """
    if nlegs % 2:
        raise ValueError("rainbow needs an even number of legs")
    arcs = arcs or {}
    h = nlegs // 2
    if h == 0:
        return np.ones(1, dtype=complex)
    t = np.ones((), dtype=complex)
    for k in range(h):
        t = np.multiply.outer(t, np.asarray(arcs.get(k, np.eye(2)), dtype=complex))
    # axes of t are legs (0, n-1, 1, n-2, ...)
    order = []
    for k in range(h):
        order += [k, nlegs - 1 - k]
    return t.transpose(np.argsort(order)).reshape(-1)


def _basis(bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2) if bits else 0] = 1.0
    return v


def swap_unitary(m, k, eps):
    """Unitary S with tau(eps) S = S tau(eps'), eps' = eps with k, k+1 exchanged."""
    delta = eps[k] - eps[k + 1]
    nl = 2 * m
    left = np.kron(np.kron(np.eye(2**k), r_matrix(-delta)), np.eye(2 ** (nl - k - 2)))
    p = nl - k - 2
    right = np.kron(np.kron(np.eye(2**p), r_matrix(delta)), np.eye(2 ** (nl - p - 2)))
    return left @ right


def adjacent_swaps(perm):
    """Adjacent transpositions turning range(m) into ``perm``, left to right."""
    cur = list(range(len(perm)))
    swaps = []
    for pos, target in enumerate(perm):
        j = cur.index(target)
        while j > pos:
            cur[j - 1], cur[j] = cur[j], cur[j - 1]
            swaps.append(j - 1)
            j -= 1
    return swaps


def permutation_unitary(m, perm, eps):
    """Unitary U with tau(eps) U = U tau(eps_P), where eps_P[i] = eps[perm[i]]."""
    eps = list(_eps(m, eps))
    if sorted(perm) != list(range(m)):
        raise ValueError(f"not a permutation of 0..{m - 1}: {perm}")
    U = np.eye(4**m, dtype=complex)
    for k in adjacent_swaps(perm):
        U = U @ swap_unitary(m, k, eps)
        eps[k], eps[k + 1] = eps[k + 1], eps[k]
    return U


def pseudo_vacuum(m, n, perm=None, eps=None):
    """Reference state with n polarized pairs around m-n contracted arcs.

    With ``perm`` the state is rotated by the permutation unitary so that it
    becomes an eigenvector of tau(eps) whose eigenvalue depends on
    eps[perm[0]], ..., eps[perm[n-1]].
    """
    if not 0 <= n <= m:
        raise ValueError(f"need 0 <= n <= m, got n={n}, m={m}")
    core = rainbow(2 * (m - n)) / 2 ** ((m - n) / 2)
    v = np.kron(np.kron(_basis([0] * n), core), _basis([1] * n))
    if perm is not None:
        v = permutation_unitary(m, perm, eps) @ v
    return v


def vacuum_orbit(m, n, eps, with_perms=False):
    """Distinct rotated vacua over all permutations of the inhomogeneities."""
    eps = _eps(m, eps)
    if m > 1 and np.min(np.diff(np.sort(eps))) < 1e-6:
        warnings.warn("nearly degenerate inhomogeneities, orbit is ill-conditioned")
    states = []
    for perm in itertools.permutations(range(m)):
        v = pseudo_vacuum(m, n, perm, eps)
        if all(abs(np.vdot(w, v)) <= 1 - 1e-9 for w, _ in states):
            states.append((v, perm))
    return states if with_perms else [v for v, _ in states]


def boundary_vector(m, alpha, side="ket"):
    """Folded Pauli operator at the light-cone corner, unit norm.

    The ket carries sigma on the innermost arc (legs m, m+1) as
    sigma[i_m, i_{m+1}].  The bra carries it on the outermost arc read right
    to left, sigma[i_2m, i_1], and is used as a row vector without
    conjugation.
    """
    s = pauli(alpha)
    if side == "ket":
        arcs = {m - 1: s}
    elif side == "bra":
        arcs = {0: s.T}
    else:
        raise ValueError("side must be 'bra' or 'ket'")
    return rainbow(2 * m, arcs) / 2 ** (m / 2)


def correlation_via_tm(m, steps, alpha, beta, lam, eps=None):
    """(sigma_beta| tau^steps |sigma_alpha), the correlator at
    x = steps - m + 1, t = steps + m - 1."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    tau = build_transfer(m, lam, eps).matrix
    ket = boundary_vector(m, alpha, "ket")
    bra = boundary_vector(m, beta, "bra")
    return complex(bra @ (mat_power(tau, steps) @ ket))


def tm_coordinates(x, t):
    """(m, steps) of the transfer-matrix evaluation for a light-cone point."""
    if (t - x) % 2:
        raise ValueError(f"t - x must be even, got x={x}, t={t}")
    m = (t - x) // 2 + 1
    steps = (t + x) // 2
    return m, steps


def otoc_pseudo_vacua(m, n, l):
    return np.kron(pseudo_vacuum(m, n), pseudo_vacuum(m, l))


def otoc_boundary_vector(m, alpha, side="ket"):
    """Boundary vectors on the 4m OTOC legs; bra-ket of identities is 1."""
    if side == "ket":
        k = boundary_vector(m, alpha, "ket")
        return np.kron(k, k)
    if side != "bra":
        raise ValueError("side must be 'bra' or 'ket'")
    s = pauli(alpha).T
    return rainbow(4 * m, {0: s, 2 * m - 1: s})


def otoc_via_tm(m, steps, alpha, beta, lam, eps=None):
    """OTOC at x = steps - m + 1, t = steps + m - 1 from the OTOC transfer matrix."""
    tau = build_transfer(m, lam, eps, kind="otoc").matrix
    ket = otoc_boundary_vector(m, alpha, "ket")
    bra = otoc_boundary_vector(m, beta, "bra")
    return complex(bra @ (mat_power(tau, steps) @ ket))


def _aux_embed(mono):
    """Monodromy as operators on (aux1 x aux2 x phys), first and second slot."""
    T = mono.tensor
    e = np.eye(2)
    d = T.shape[2]
    T1 = np.einsum("abIJ,cd->acIbdJ", T, e).reshape(4 * d, 4 * d)
    T2 = np.einsum("cdIJ,ab->acIbdJ", T, e).reshape(4 * d, 4 * d)
    return T1, T2


def rtt_residual(m, lam, mu, eps=None):
    """Max-norm residual of R(mu-lam) T1(lam) T2(mu) = T2(mu) T1(lam) R(mu-lam)
    with the non-braided R = P R-check."""
    t1, _ = _aux_embed(build_monodromy(m, lam, eps))
    _, t2 = _aux_embed(build_monodromy(m, mu, eps))
    d = 4**m
    R = np.kron(SWAP @ r_matrix(mu - lam), np.eye(d))
    lhs = R @ t1 @ t2
    rhs = t2 @ t1 @ R
    return float(np.abs(lhs - rhs).max())
