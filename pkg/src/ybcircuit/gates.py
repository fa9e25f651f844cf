"""Two-qubit R-check gates, the braiding relation and the Trotter identity.

Basis order is |00>, |01>, |10>, |11> with the left tensor factor on the left
circuit leg.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DomainError

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
ID2 = np.eye(2, dtype=complex)

# Pauli matrices indexed 0, x, y, z
PAULI = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PAULI_LABELS = ("0", "x", "y", "z")


def pauli(alpha):
    """Pauli matrix from a label in {0, x, y, z} or an index 0..3."""
    if isinstance(alpha, (int, np.integer)):
        alpha = PAULI_LABELS[alpha]
    try:
        return PAULI[str(alpha)]
    except KeyError:
        raise ValueError(f"unknown Pauli label {alpha!r}") from None


@dataclass(frozen=True)
class Gate:
    matrix: np.ndarray
    lam: float
    eps: float = 0.0

    @property
    def arg(self):
        return self.lam - self.eps


def r_matrix(arg):
    """(I + i arg P) / (1 + i arg) as a bare 4x4 array; arg may be complex."""
    return (np.eye(4) + 1j * arg * SWAP) / (1 + 1j * arg)


def r_check(lam, eps=0.0):
    """R-check gate evaluated at lam - eps."""
    return Gate(r_matrix(lam - eps), float(lam), float(eps))


def check_braiding(lam, mu):
    """Max-norm residual of the braiding relation on three qubits."""
    r12 = lambda x: np.kron(r_matrix(x), ID2)
    r23 = lambda x: np.kron(ID2, r_matrix(x))
    lhs = r12(lam) @ r23(lam + mu) @ r12(mu)
    rhs = r23(mu) @ r12(lam + mu) @ r23(lam)
    return float(np.abs(lhs - rhs).max())


def xxx_bond(J=1.0):
    """Two-site Hamiltonian -J (XX + YY + ZZ)."""
    return -J * sum(np.kron(pauli(a), pauli(a)) for a in "xyz")


def trotter_gate(J, dt):
    """Gate and phase with phase * gate = exp(-i dt h) for the XXX bond h."""
    theta = 2 * J * dt
    if not abs(theta) < np.pi / 2:
        raise DomainError(f"|2 J dt| = {abs(theta)} must be below pi/2")
    return r_check(np.tan(theta)), np.exp(1j * J * dt)


def trotter_residual(J, dt):
    gate, phase = trotter_gate(J, dt)
    exact = sla.expm(-1j * dt * xxx_bond(J))
    return float(np.abs(phase * gate.matrix - exact).max())


def doubled_gate(lam):
    """Adjoint and forward gates sharing one auxiliary line.

    Returned as R[a, b, (i, i'), (j, j')] with a, b auxiliary, i the output on
    the adjoint leg and i' the output on the forward leg.
    """
    back = r_matrix(-lam).reshape(2, 2, 2, 2)  # [a, i, j, c]
    fwd = r_matrix(lam).reshape(2, 2, 2, 2)  # [j', c, b, i']
    out = np.einsum("aijc,kcbl->abiljk", back, fwd)
    return out.reshape(2, 2, 4, 4)


def spin1_lax_elements(lam, alpha, beta):
    """Closed-form 2x2 auxiliary matrix <sigma_alpha| R |sigma_beta>."""
    sa, sb = pauli(alpha), pauli(beta)
    if str(alpha) in "xyz" and str(beta) in "xyz":
        a, b = "xyz".index(str(alpha)), "xyz".index(str(beta))
        spin = sum(-1j * _levi(a, b, g) * pauli("xyz"[g]) for g in range(3))
        return 2 * lam / (1 + lam**2) * (lam * (a == b) * ID2 + 1j * spin)
    comm = sa @ sb - sb @ sa
    return (
        np.trace(sa) * sb - 1j * lam * comm + lam**2 * np.trace(sa @ sb) * ID2
    ) / (1 + lam**2)


def _levi(a, b, c):
    return (a - b) * (b - c) * (c - a) / 2


def check_spin1_lax(lam):
    """Max deviation of the doubled gate from its spin-1 Lax closed form."""
    R = doubled_gate(lam)
    worst = 0.0
    for alpha in PAULI_LABELS:
        bra = pauli(alpha).conj().reshape(4)
        for beta in PAULI_LABELS:
            m = np.einsum("I,abIJ,J->ab", bra, R, pauli(beta).reshape(4))
            worst = max(worst, np.abs(m - spin1_lax_elements(lam, alpha, beta)).max())
    return float(worst)
