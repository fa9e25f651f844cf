"""Brute-force brickwork circuit on a periodic chain.

U(t) = V_1 V_2 ... V_t as a matrix product, where V_k acts on the bonds
(0,1), (2,3), ... for odd k and on (1,2), (3,4), ..., (L-1,0) for even k.
Correlators are tr(sigma_alpha(0) U sigma_beta(x) U^dag) / 2^L.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import ResourceError
from .gates import pauli, r_matrix, xxx_bond

MAX_DENSE_L = 12
MAX_OTOC_L = 10


@dataclass(frozen=True)
class ChainSpec:
    L: int
    t: int
    lam: float
    # eps[k - 1, b] shifts the gate on bond b of layer k
    inhomogeneities: Optional[np.ndarray] = None
    boundary: str = "periodic"

    def __post_init__(self):
        if self.L % 2 or not 2 <= self.L <= MAX_DENSE_L:
            raise ValueError(f"L must be even with 2 <= L <= {MAX_DENSE_L}, got {self.L}")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")
        if self.inhomogeneities is not None:
            shape = np.shape(self.inhomogeneities)
            if shape != (self.t, self.L // 2):
                raise ValueError(f"inhomogeneities must have shape {(self.t, self.L // 2)}")

    @property
    def light_cone_ok(self):
        return self.L >= 2 * self.t + 2


def default_length(t):
    return max(2 * t + 2, 4)


def layer_bonds(L, k):
    """Bonds (left, right) of layer k, counted from 1."""
    p = (k - 1) % 2
    return [((2 * b + p) % L, (2 * b + p + 1) % L) for b in range(L // 2)]


def _gate(spec, k, b):
    eps = 0.0 if spec.inhomogeneities is None else spec.inhomogeneities[k - 1][b]
    return r_matrix(spec.lam - eps).reshape(2, 2, 2, 2)


def _apply(tensor, g, s1, s2, offset=0):
    """Contract a [o1, o2, i1, i2] gate into legs offset+s1, offset+s2."""
    out = np.tensordot(g, tensor, axes=([2, 3], [offset + s1, offset + s2]))
    return np.moveaxis(out, [0, 1], [offset + s1, offset + s2])


def _layers(spec):
    for k in range(spec.t, 0, -1):
        for b, (s1, s2) in enumerate(layer_bonds(spec.L, k)):
            yield k, b, s1, s2


def build_brick_circuit(spec):
    """Dense 2^L x 2^L matrix of U(t)."""
    L = spec.L
    U = np.eye(2**L, dtype=complex).reshape((2,) * (2 * L))
    for k, b, s1, s2 in _layers(spec):
        U = _apply(U, _gate(spec, k, b), s1, s2)
    return U.reshape(2**L, 2**L)


def local_operator(L, site, op):
    """Single-site operator at ``site`` as a 2L-leg tensor."""
    site %= L
    full = np.kron(np.kron(np.eye(2**site), op), np.eye(2 ** (L - site - 1)))
    return full.astype(complex).reshape((2,) * (2 * L))


def heisenberg(spec, op_tensor):
    """U O U^dag for O given as a 2L-leg tensor."""
    L = spec.L
    O = op_tensor
    for k, b, s1, s2 in _layers(spec):
        g = _gate(spec, k, b)
        O = _apply(O, g, s1, s2)
        O = _apply(O, g.conj(), s1, s2, offset=L)
    return O


def _evolved(spec, x, beta, max_l):
    if spec.L > max_l:
        raise ResourceError(f"L={spec.L} exceeds the dense cap {max_l}")
    if not abs(x) < spec.L / 2:
        raise ValueError(f"|x| must be below L/2, got x={x}")
    return heisenberg(spec, local_operator(spec.L, x, pauli(beta)))


def infinite_temp_correlation(spec, x, alpha, beta):
    """tr(sigma_alpha(0) U sigma_beta(x) U^dag) / 2^L."""
    L = spec.L
    O = _evolved(spec, x, beta, MAX_DENSE_L).reshape(2, 2 ** (L - 1), 2, 2 ** (L - 1))
    a = pauli(alpha)
    return complex(np.einsum("ij,jkik->", a, O) / 2**L)


def correlation_table(spec, x):
    """4 x 4 array C[alpha, beta] over the Pauli labels 0, x, y, z."""
    L = spec.L
    table = np.zeros((4, 4), dtype=complex)
    for b in range(4):
        O = _evolved(spec, x, b, MAX_DENSE_L).reshape(2, 2 ** (L - 1), 2, 2 ** (L - 1))
        block = np.einsum("jkik->ij", O)
        for a in range(4):
            table[a, b] = np.sum(pauli(a) * block) / 2**L
    return table


def otoc_direct(spec, x, alpha, beta):
    """tr(A B(t) A B(t)) / 2^L with A = sigma_alpha(0), B(t) the evolved sigma_beta(x)."""
    L = spec.L
    O = _evolved(spec, x, beta, MAX_OTOC_L).reshape(2, 2 ** (L - 1), 2, 2 ** (L - 1))
    M = np.einsum("ij,jkrl->ikrl", pauli(alpha), O).reshape(2**L, 2**L)
    return complex(np.sum(M * M.T) / 2**L)


def light_cone_inhomogeneities(L, t, diagonal_eps):
    """Per-gate shifts constant along the diagonals of the light cone.

    Gate (k, b) with signed left site s sits on diagonal (s - k + 1) // 2;
    ``diagonal_eps`` maps a diagonal to its shift and may be a callable or a
    mapping (missing diagonals get 0).
    """
    get = diagonal_eps if callable(diagonal_eps) else (lambda d: diagonal_eps.get(d, 0.0))
    eps = np.zeros((t, L // 2))
    for k in range(1, t + 1):
        for b, (s, _) in enumerate(layer_bonds(L, k)):
            signed = s if s < L // 2 else s - L
            eps[k - 1, b] = get((signed - k + 1) // 2)
    return eps


def transfer_eps_to_diagonals(eps):
    """Diagonal shifts reproducing the transfer matrix with inhomogeneities eps."""
    return {1 - k: float(e) for k, e in enumerate(eps, start=1)}


def xxx_hamiltonian(L, J=1.0):
    """Periodic XXX chain sum of -J (XX + YY + ZZ) over all bonds."""
    H = np.zeros((2**L, 2**L), dtype=complex)
    h = xxx_bond(J).reshape(2, 2, 2, 2)
    for s in range(L):
        eye = np.eye(2**L, dtype=complex).reshape((2,) * (2 * L))
        H += _apply(eye, h, s, (s + 1) % L).reshape(2**L, 2**L)
    return H


def hamiltonian_correlation(L, time, x, alpha, beta, J=1.0):
    """tr(sigma_alpha(0) e^{-iHt} sigma_beta(x) e^{iHt}) / 2^L."""
    U = sla.expm(-1j * time * xxx_hamiltonian(L, J))
    B = local_operator(L, x, pauli(beta)).reshape(2**L, 2**L)
    A = local_operator(L, 0, pauli(alpha)).reshape(2**L, 2**L)
    return complex(np.trace(A @ U @ B @ U.conj().T) / 2**L)


def trotter_correlation(L, time, dt, x, alpha, beta, J=1.0):
    """Circuit correlator approximating the XXX chain at physical time ``time``.

    Symmetric splitting: half-step even layers at both ends around
    alternating full steps, 2 time/dt + 1 layers in total.  The half steps
    are encoded as layer-wise inhomogeneities.
    """
    steps = int(round(time / dt))
    if steps < 1 or not np.isclose(steps * dt, time):
        raise ValueError("time must be a positive multiple of dt")
    lam = float(np.tan(2 * J * dt))
    eps = np.zeros((2 * steps + 1, L // 2))
    eps[[0, -1], :] = lam - np.tan(J * dt)
    spec = ChainSpec(L, 2 * steps + 1, lam, eps)
    return infinite_temp_correlation(spec, x, alpha, beta)
