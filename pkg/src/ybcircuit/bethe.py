"""Spin-1 Bethe equations behind the correlation transfer matrix.

An effective chain of n sites with inhomogeneities eps_l carries N
rapidities solving

    prod_l (x_j - eps_l - i) / (x_j - eps_l + i)
        = prod_{k != j} (x_k - x_j + i) / (x_k - x_j - i).

A rapidity equal to eps_l in the homogeneous case is a zero mode: the
equation for it holds only before dividing out the common factor
prod_l (x_j - eps_l), and B(eps) lowers the vacuum index by one.
"""

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .errors import NullStateError, PoleError, SingularConfigurationError
from .transfer import build_monodromy, build_transfer, pseudo_vacuum

ACCEPT_RESIDUAL = 1e-9
DISTINCT_GAP = 1e-8
DIVERGENT = 1e6
SINGULAR_GAP = 1e-12


@dataclass(frozen=True)
class BetheRootSet:
    n: int
    roots: tuple
    eps: tuple
    residual: float
    zero_modes: int = 0
    # homogeneous limit of a regular solution that lands on a pole
    singular: bool = False

    @property
    def N(self):
        return len(self.roots)

    @property
    def spin(self):
        return self.n - self.N


@dataclass(frozen=True)
class BetheStateSpec:
    rootset: BetheRootSet
    m: int
    # inhomogeneities of all m columns; rootset.eps are those picked by perm
    eps: Optional[tuple] = None
    perm: Optional[tuple] = None

    @property
    def n(self):
        return self.rootset.n


@dataclass
class SolveReport:
    solutions: list
    attempts: int = 0
    converged: int = 0
    rejected: dict = field(default_factory=dict)


def _eps(n, eps):
    if eps is None:
        return np.zeros(n)
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (n,):
        raise ValueError(f"need {n} inhomogeneities, got {eps.shape}")
    return eps


def _check_singular(x, eps):
    for j, xj in enumerate(x):
        if np.any(np.abs(np.abs(xj - eps - 1j) * np.abs(xj - eps + 1j)) < SINGULAR_GAP):
            raise SingularConfigurationError(f"root {xj} sits on eps +- i")
        for k, xk in enumerate(x):
            if k != j and min(abs(xk - xj - 1j), abs(xk - xj + 1j)) < SINGULAR_GAP:
                raise SingularConfigurationError(f"roots {xj}, {xk} differ by +- i")


def _sides(x, eps):
    u = x[:, None] - eps[None, :]
    lhs = np.prod((u - 1j) / (u + 1j), axis=1)
    v = x[None, :] - x[:, None]  # v[j, k] = x_k - x_j
    off = ~np.eye(len(x), dtype=bool)
    h = np.ones_like(v)
    h[off] = (v[off] + 1j) / (v[off] - 1j)
    rhs = np.prod(h, axis=1)
    return u, v, lhs, rhs


def bethe_residual(roots, n, eps=None):
    """Per-root defect of the rational Bethe equations."""
    x = np.asarray(roots, dtype=complex).ravel()
    eps = _eps(n, eps)
    if len(x) == 0:
        return np.zeros(0)
    _check_singular(x, eps)
    _, _, lhs, rhs = _sides(x, eps)
    return np.abs(lhs - rhs)


def undivided_residual(roots, n, eps=None):
    """Defect with both sides multiplied by prod_l (x_j - eps_l)."""
    x = np.asarray(roots, dtype=complex).ravel()
    eps = _eps(n, eps)
    if len(x) == 0:
        return np.zeros(0)
    _check_singular(x, eps)
    u, _, lhs, rhs = _sides(x, eps)
    return np.abs(np.prod(u, axis=1) * (lhs - rhs))


def _prod_and_grad(factors):
    """Product of the columns of each row and its derivative w.r.t. each column."""
    n = factors.shape[1]
    total = np.prod(factors, axis=1)
    grad = np.empty_like(factors)
    for c in range(n):
        grad[:, c] = np.prod(np.delete(factors, c, axis=1), axis=1)
    return total, grad


def _system(x, eps):
    """Denominator-free equations G_j = P_j - Q_j and their Jacobian.

    P_j = prod_l (x_j - eps_l - i) prod_{k != j} (x_k - x_j - i), Q_j the same
    with +i; G vanishes on every solution of the rational form and stays
    finite near strings.
    """
    N = len(x)
    u = x[:, None] - eps[None, :]
    v = x[None, :] - x[:, None]  # v[j, k] = x_k - x_j
    off = ~np.eye(N, dtype=bool)
    vo = v[off].reshape(N, N - 1)
    cols = [np.flatnonzero(off[j]) for j in range(N)]
    J = np.zeros((N, N), dtype=complex)
    G = np.zeros(N, dtype=complex)
    for sign, weight in ((-1j, 1.0), (1j, -1.0)):
        fac = np.concatenate([u + sign, vo + sign], axis=1)
        total, grad = _prod_and_grad(fac)
        G += weight * total
        nl = u.shape[1]
        J[np.arange(N), np.arange(N)] += weight * (grad[:, :nl].sum(axis=1) - grad[:, nl:].sum(axis=1))
        for j in range(N):
            J[j, cols[j]] += weight * grad[j, nl:]
    return G, J


def _rational_defect(x, eps):
    """Max over j of |L_j - R_j| / max(1, |L_j|, |R_j|)."""
    if len(x) == 0:
        return 0.0
    with np.errstate(all="ignore"):
        _, _, lhs, rhs = _sides(x, eps)
        d = np.abs(lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        d = np.max(d)
    return float(d) if np.isfinite(d) else np.inf


def newton(x0, eps, max_iter=100, tol=1e-15):
    """Damped Newton on the polynomial form; returns (roots, rational defect)."""
    x = np.asarray(x0, dtype=complex).copy()
    eps = np.asarray(eps, dtype=float)
    for _ in range(max_iter):
        G, J = _system(x, eps)
        norm = np.max(np.abs(G))
        scale = max(1.0, np.max(np.abs(x))) ** (len(eps) + len(x) - 1)
        if not np.isfinite(norm):
            return x, np.inf
        if norm < tol * scale:
            break
        try:
            step = np.linalg.solve(J, -G)
        except np.linalg.LinAlgError:
            return x, np.inf
        if not np.all(np.isfinite(step)):
            return x, np.inf
        t = 1.0
        while True:
            trial = x + t * step
            nt = np.max(np.abs(_system(trial, eps)[0]))
            if nt < norm or t < 1e-4:
                break
            t *= 0.5
        x = trial
        if np.max(np.abs(t * step)) < 1e-15 * max(1.0, np.max(np.abs(x))):
            break
    return x, _rational_defect(x, eps)


def _seed_patterns(N, eps):
    c = float(np.mean(eps)) if len(eps) else 0.0
    pats = []
    for width in (0.3, 1.0, 2.5):
        pats.append(c + width * np.linspace(-1, 1, N) + 0.05j)
    for width in (0.5, 1.5):
        centers = c + width * np.linspace(-1, 1, (N + 1) // 2)
        pair = np.concatenate([centers + 0.55j, centers - 0.55j])[:N]
        pats.append(pair)
    pats.append(c + 0.6j * np.linspace(-1, 1, N) + 0.01)
    if len(eps) > 1 and np.ptp(eps) > 0:
        lo, hi = float(np.min(eps)), float(np.max(eps))
        pats.append(np.linspace(lo, hi, N) + 0.05j)
        if N >= 2:
            # a two-string anchored at each eps and each midpoint, the rest spread
            anchors = sorted(set(eps) | {(a + b) / 2 for a, b in itertools.combinations(eps, 2)})
            rest = c + np.linspace(-1, 1, N - 2) + 0.05j
            for a in anchors:
                for h in (0.55, 0.9):
                    pats.append(np.concatenate([[a + 1j * h, a - 1j * h], rest]))
    if N >= 3:
        # near-exact three-strings c, c +- i
        for center in (c, c - 0.7, c + 0.7):
            base = center + np.array([0.02, 0.99j, -0.99j])
            rest = center + 1.5 * np.linspace(-1, 1, N - 3) + 0.1j if N > 3 else []
            pats.append(np.concatenate([base, rest]))
    return pats


def _canonical(x):
    return tuple(sorted((complex(z) for z in x), key=lambda z: (round(z.real, 9), z.imag)))


def _same(a, b, tol=1e-7):
    if len(a) != len(b):
        return False
    used = set()
    for z in a:
        hits = [k for k, w in enumerate(b) if k not in used and abs(z - w) < tol]
        if not hits:
            return False
        used.add(hits[0])
    return True


def _admissible(x, eps, resid, report):
    def reject(reason):
        report.rejected[reason] = report.rejected.get(reason, 0) + 1
        return False

    if resid > ACCEPT_RESIDUAL:
        return reject("residual")
    if np.any(np.abs(x) > DIVERGENT):
        return reject("divergent")
    if len(x) > 1 and np.min(np.abs(x[:, None] - x[None, :]) + np.eye(len(x))) < DISTINCT_GAP:
        return reject("coinciding")
    if len(eps) and np.min(np.abs(x[:, None] - eps[None, :])) < DISTINCT_GAP:
        return reject("zero_mode")
    try:
        _check_singular(x, eps)
    except SingularConfigurationError:
        return reject("singular")
    return True


def _regular_solutions(n, N, eps, seeds, restarts, rng, rep):
    gen = np.random.default_rng(rng)
    starts = [np.asarray(s_, dtype=complex) for s_ in (seeds or [])]
    for pat in _seed_patterns(N, eps):
        starts.append(pat)
        for _ in range(restarts):
            starts.append(pat + 0.3 * (gen.normal(size=N) + 1j * gen.normal(size=N)))
    found = []

    def add(x, resid):
        key = _canonical(x)
        if not any(_same(key, f.roots) for f in found):
            found.append(BetheRootSet(n, key, tuple(eps), float(resid)))

    for x0 in starts:
        rep.attempts += 1
        x, resid = newton(x0, eps)
        if not np.isfinite(resid):
            continue
        rep.converged += 1
        if _admissible(x, eps, resid, rep):
            add(x, resid)
    for f in list(found):
        x, resid = newton(np.conj(f.roots), eps)
        if _admissible(x, eps, resid, rep):
            add(x, resid)
    return found


def _limit_pattern(n):
    # asymmetric so that limits are approached along a generic direction
    k = np.arange(n)
    return (k - (n - 1) / 2) / max(n - 1, 1) + 0.13 * k**2


def _snap(z, center, tol=1e-3):
    re = center if abs(z.real - center) < tol else z.real
    half = round(2 * z.imag) / 2
    im = half if abs(z.imag - half) < tol else z.imag
    return complex(re, im)


def _homogeneous_limits(n, N, e0, restarts, rng, rep):
    """Continue regular inhomogeneous solutions to eps = e0 and classify the limits."""
    p = _limit_pattern(n)
    delta = 0.5
    out = []
    for start in _regular_solutions(n, N, e0 + delta * p, None, restarts, rng, SolveReport([])):
        path = [(delta, np.array(start.roots))]
        d = delta
        while d > 1e-8:
            d *= 0.7
            xn, resid = newton(path[-1][1], e0 + d * p)
            # near a singular limit the defect degrades; keep the good part of the path
            if not resid <= ACCEPT_RESIDUAL:
                break
            path.append((d, xn))
        if len(path) < 3:
            rep.rejected["continuation"] = rep.rejected.get("continuation", 0) + 1
            continue
        ds = np.array([q[0] for q in path[-3:]])
        xs = np.array([q[1] for q in path[-3:]])
        # quadratic extrapolation of each root to d = 0
        x = np.array([np.polyval(np.polyfit(ds, xs[:, j], 2), 0.0) for j in range(N)])
        y = np.array([_snap(z, e0) for z in x])
        try:
            _check_singular(y, np.full(n, e0))
        except SingularConfigurationError:
            defect = float(np.max(np.abs(y - x)))
            out.append(BetheRootSet(n, _canonical(y), (e0,) * n, defect, singular=True))
            continue
        if np.min(np.abs(x - e0)) < 1e-3:
            continue  # zero-mode limit, enumerated separately
        xr, r = newton(x, np.full(n, e0))
        if _admissible(xr, np.full(n, e0), r, rep):
            out.append(BetheRootSet(n, _canonical(xr), (e0,) * n, float(r)))
    return out


def solve_bethe(n, N, eps=None, seeds=None, restarts=20, rng=0, report=False, limits=True):
    """Distinct root sets for N rapidities on n sites.

    Regular solutions come from damped Newton over string-pattern seeds.  For
    homogeneous eps two more families are added: zero modes (a root at the
    common eps joined with each (n-1, N-1) solution) and, with ``limits``,
    homogeneous limits of inhomogeneous solutions, which may be singular.
    With ``report`` a SolveReport with attempt statistics is returned.

    Beyond the equator (N > n) solutions are not isolated: they come in
    continuous families that repeat eigenvalues of smaller N, so none are
    enumerated.
    """
    if N > 2 * n:
        raise ValueError(f"N={N} exceeds the capacity 2n={2 * n}")
    eps = _eps(n, eps)
    rep = SolveReport([])
    if N == 0:
        rep.solutions = [BetheRootSet(n, (), tuple(eps), 0.0)]
        return rep if report else rep.solutions
    if N > n:
        rep.rejected["beyond_equator"] = 1
        return rep if report else rep.solutions
    found = _regular_solutions(n, N, eps, seeds, restarts, rng, rep)
    homogeneous = n >= 1 and np.ptp(eps) == 0
    if homogeneous and limits and n >= 2:
        for f in _homogeneous_limits(n, N, float(eps[0]), restarts, rng, rep):
            if not any(_same(f.roots, g.roots) for g in found):
                found.append(f)
    if homogeneous:
        e0 = float(eps[0])
        for sub in solve_bethe(n - 1, N - 1, eps[:-1], restarts=restarts, rng=rng, limits=limits):
            x = np.array(sub.roots + (e0,), dtype=complex)
            if len(x) > 1 and np.min(np.abs(x[:-1] - e0)) < DISTINCT_GAP:
                continue
            if sub.singular:
                resid = sub.residual
            else:
                try:
                    main = bethe_residual(x, n, eps)[:-1]
                    zero = undivided_residual(x, n, eps)[-1]
                except SingularConfigurationError:
                    continue
                resid = float(max(np.max(main, initial=0.0), zero))
            if resid <= ACCEPT_RESIDUAL:
                found.append(
                    BetheRootSet(n, _canonical(x), tuple(eps), resid, sub.zero_modes + 1, sub.singular)
                )
    found.sort(key=lambda f: (f.zero_modes, f.singular, [(round(z.real, 9), z.imag) for z in f.roots]))
    rep.solutions = found
    return rep if report else found


def bethe_eigenvalue(mu, rootset, m=None):
    """Transfer-matrix eigenvalue at spectral parameter mu."""
    x = np.asarray(rootset.roots, dtype=complex)
    if len(x) and np.min(np.abs(x - mu)) < SINGULAR_GAP:
        raise PoleError(f"mu={mu} coincides with a rapidity")
    u = mu - np.asarray(rootset.eps, dtype=float)
    a = np.prod(1j * u / (1 + 1j * u))
    d = np.prod(-1j * u / (1 - 1j * u))
    fa = np.prod(1 + 1j / (x - mu))
    fd = np.prod(1 - 1j / (x - mu))
    return complex(0.5 * (a * fa + d * fd))


def bethe_state(spec, normalize=False):
    """prod_k B(x_k) applied to the (rotated) pseudo-vacuum."""
    if spec.rootset.singular:
        raise SingularConfigurationError("creation operators are undefined at a pole")
    m, n = spec.m, spec.n
    eps = tuple(spec.eps) if spec.eps is not None else (0.0,) * m
    v = pseudo_vacuum(m, n, spec.perm, eps)
    ref = np.linalg.norm(v)
    for x in spec.rootset.roots:
        v = build_monodromy(m, x, eps).B @ v
        ref *= max(1.0, np.linalg.norm(build_monodromy(m, x, eps).B, 2))
    norm = np.linalg.norm(v)
    if norm <= 1e-10 * ref:
        raise NullStateError("creation operators annihilate the vacuum")
    return v / norm if normalize else v


def state_residual(spec, mu):
    """Relative eigen-residual of the Bethe state for tau(mu)."""
    v = bethe_state(spec, normalize=True)
    eps = tuple(spec.eps) if spec.eps is not None else None
    tau = build_transfer(spec.m, mu, eps).matrix
    t = bethe_eigenvalue(mu, spec.rootset)
    return float(np.linalg.norm(tau @ v - t * v))


def trinomial(n, N):
    """Coefficient of x^N in (1 + x + x^2)^n."""
    if N < 0 or N > 2 * n:
        return 0
    return sum(comb(n, k) * comb(n - k, N - 2 * k) for k in range(N // 2 + 1) if N - 2 * k <= n - k)


def highest_weight_count(n, N):
    """Number of spin n-N multiplets in n spin-1 sites."""
    return trinomial(n, N) - trinomial(n, N - 1) if N <= n else 0


def count_states(m):
    """(homogeneous_total, inhomogeneous_total) Bethe state counts."""
    if m < 1:
        raise ValueError("m must be at least 1")
    inhom = sum(comb(m, n) * 3**n for n in range(m + 1))
    assert inhom == 4**m
    hom = sum(3**n for n in range(m + 1))
    assert hom == (3 ** (m + 1) - 1) // 2
    return hom, inhom


def bethe_spectrum(m, mu, eps, n_max_roots=None, rng=0):
    """Eigenvalues of tau(mu|eps) from all vacuum subsets and Bethe solutions.

    Highest-weight solutions with N <= n are counted with multiplicity
    2(n - N) + 1; zero modes only repeat smaller vacua and are skipped.  ``n_max_roots`` limits N.
    """
    eps = tuple(float(e) for e in eps)
    out = []
    for n in range(m + 1):
        for subset in itertools.combinations(range(m), n):
            sub_eps = [eps[i] for i in subset]
            for N in range(n + 1):
                if n_max_roots is not None and N > n_max_roots:
                    continue
                for rs in solve_bethe(n, N, sub_eps, rng=rng):
                    if rs.zero_modes:
                        continue
                    out.extend([bethe_eigenvalue(mu, rs)] * (2 * (n - N) + 1))
    return np.array(out)
