"""Spectral decomposition of the finite-rank Hankel operator of a rational symbol.

The range of the operator attached to a degree-N symbol is spanned by the
partial-fraction basis 1/(x-p_j)^l.  We orthonormalize through the Cholesky
factor of the Gram matrix, represent the antilinear Hankel action there as a
complex-symmetric matrix K (so the squared operator is the Hermitian product
K K^H), and fix eigenvector phases so that the antilinear eigenrelation
H e_j = lambda_j e_j holds with positive lambda_j.  Inside a degenerate
eigenspace the antilinear conjugation C = H/lambda is an antiunitary
involution and we return an orthonormal basis of its fixed real subspace.

Spectral coordinates extracted here: lambda_j, beta_j = (g, e_j),
nu_j = |beta_j|, the angle 2*phi_j = arg(beta_j^2), and the generalized
angle gamma_j = Re (T e_j, e_j), where T f = x f - Lambda(f) b_u is the
infinitesimal shift on the range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError
from .rational import (
    BlaschkeData,
    HardyRational,
    blaschke,
    hankel_apply,
    hardy_from_terms,
    inner_product,
)

GRAM_COND_LIMIT = 1e12
CLUSTER_RTOL = 1e-8       # relative gap that groups eigenvalues of H^2
RANK_RTOL = 1e-10         # lambda below this (vs. lambda_max) means rank-deficient
NU_RTOL = 1e-8            # nu below this (vs. ||g||) counts as a vanishing coordinate

__all__ = [
    "RangeBasis",
    "SpectralDecomposition",
    "TMatrix",
    "build_range_basis",
    "hankel_matrix",
    "eigendecompose",
    "t_matrix",
    "classify_genericity",
    "eigenfunction",
    "coords_to_function",
    "function_coords",
    "decomposition_to_json",
]


@dataclass(frozen=True)
class RangeBasis:
    """Partial-fraction basis of Ran(H_u) with its Gram geometry.

    `index` enumerates the basis: entry a is (pole, l) meaning 1/(x-pole)^l.
    `gram` is the Hermitian positive-definite matrix G[a, b] = (f_a, f_b).
    Coordinate vectors pair as (h1, h2) = c2^H conj(G) c1, so `chol` holds
    the lower Cholesky factor L of conj(G) and orthonormalized coordinates
    are d = L^H c.
    """

    index: tuple[tuple[complex, int], ...]
    gram: np.ndarray
    chol: np.ndarray

    @property
    def size(self) -> int:
        return len(self.index)

    def basis_fn(self, a: int) -> HardyRational:
        pole, l = self.index[a]
        return hardy_from_terms([(pole, [0.0j] * (l - 1) + [1.0 + 0.0j])])


@dataclass(frozen=True)
class TMatrix:
    """Matrix entries t[k, j] = (T e_j, e_k) and its adjoint."""

    t: np.ndarray
    t_star: np.ndarray


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendata of the squared Hankel operator plus angle coordinates.

    `evecs` columns are the phase-fixed eigenvectors in the orthonormalized
    range basis; `clusters` groups indices of (numerically) equal
    eigenvalues; `two_phis` stores 2*phi_j in [0, 2pi), the quantity that is
    insensitive to the residual e_j -> -e_j ambiguity.
    """

    u: HardyRational
    rb: RangeBasis
    bl: BlaschkeData
    lambdas: np.ndarray
    evecs: np.ndarray
    betas: np.ndarray
    nus: np.ndarray
    two_phis: np.ndarray
    gammas: np.ndarray
    clusters: tuple[tuple[int, ...], ...]
    genericity: str

    @property
    def size(self) -> int:
        return len(self.lambdas)

    def cluster_of(self, j: int) -> tuple[int, ...]:
        for c in self.clusters:
            if j in c:
                return c
        raise IndexError(j)


def build_range_basis(u: HardyRational) -> RangeBasis:
    """Enumerate 1/(x-p_j)^l and assemble the Gram matrix by residues."""
    if u.is_zero():
        raise PreconditionError("undefined for zero symbol")
    index = []
    for t in u.terms:
        for l in range(1, t.multiplicity + 1):
            index.append((t.pole, l))
    n = len(index)
    fns = []
    for a, (pole, l) in enumerate(index):
        fns.append(hardy_from_terms([(pole, [0.0j] * (l - 1) + [1.0 + 0.0j])]))
    G = np.empty((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            G[a, b] = inner_product(fns[a], fns[b])
            G[b, a] = np.conj(G[a, b])
    evals = np.linalg.eigvalsh(G)
    if evals[0] <= 0 or evals[-1] / evals[0] > GRAM_COND_LIMIT:
        raise NumericalError("ill-conditioned range basis")
    L = np.linalg.cholesky(np.conj(G))
    return RangeBasis(tuple(index), G, L)


def function_coords(f: HardyRational, rb: RangeBasis) -> np.ndarray:
    """Partial-fraction coordinates of f in the range basis.

    Raises if f carries mass outside the basis (a range-leakage signal).
    """
    c = np.zeros(rb.size, dtype=complex)
    budget = f.max_coeff()
    lookup = {}
    for a, (pole, l) in enumerate(rb.index):
        lookup[(round(pole.real, 9), round(pole.imag, 9), l)] = a
    for t in f.terms:
        match = None
        for a, (pole, l) in enumerate(rb.index):
            if abs(pole - t.pole) <= 1e-9 * max(1.0, abs(pole)):
                match = pole
                break
        if match is None:
            if max(abs(x) for x in t.coeffs) > 1e-8 * max(1.0, budget):
                raise NumericalError("range leakage")
            continue
        for l, coeff in enumerate(t.coeffs, start=1):
            found = False
            for a, (pole, ll) in enumerate(rb.index):
                if ll == l and abs(pole - t.pole) <= 1e-9 * max(1.0, abs(pole)):
                    c[a] = coeff
                    found = True
                    break
            if not found and abs(coeff) > 1e-8 * max(1.0, budget):
                raise NumericalError("range leakage")
    return c


def coords_to_function(c: np.ndarray, rb: RangeBasis) -> HardyRational:
    pairs = {}
    for a, (pole, l) in enumerate(rb.index):
        key = pole
        if key not in pairs:
            pairs[key] = []
        stack = pairs[key]
        while len(stack) < l:
            stack.append(0.0j)
        stack[l - 1] += complex(c[a])
    return hardy_from_terms(list(pairs.items()))


def hankel_matrix(u: HardyRational, rb: RangeBasis) -> np.ndarray:
    """M with H_u f_a = sum_b M[b, a] f_b; the map itself is h -> M conj(h)."""
    n = rb.size
    M = np.empty((n, n), dtype=complex)
    for a in range(n):
        w = hankel_apply(u, rb.basis_fn(a))
        M[:, a] = function_coords(w, rb)
    return M


def _orthonormal_hankel(rb: RangeBasis, M: np.ndarray) -> np.ndarray:
    """K with the antilinear action d -> K conj(d) in the orthonormal basis."""
    L = rb.chol
    Linv = np.linalg.inv(L)
    K = L.conj().T @ M @ Linv.T
    return K


def _cluster_indices(vals: np.ndarray) -> tuple[tuple[int, ...], ...]:
    groups = [[0]]
    for i in range(1, len(vals)):
        if vals[i] - vals[groups[-1][0]] <= CLUSTER_RTOL * max(vals[i], vals[-1] * 1e-6):
            groups[-1].append(i)
        else:
            groups.append([i])
    return tuple(tuple(g) for g in groups)


def _fixed_subspace_basis(K: np.ndarray, V: np.ndarray, lam: float) -> np.ndarray:
    """Orthonormal basis of {v in span(V): K conj(v) = lam v}.

    The conjugation C d = K conj(d)/lam is an antiunitary involution of the
    eigenspace; real-linear combinations v + C v span its fixed real form.
    """
    m = V.shape[1]
    B = V.conj().T @ K @ np.conj(V) / lam
    cands = []
    for k in range(m):
        e = np.zeros(m, dtype=complex)
        e[k] = 1.0
        cands.append(e + B @ np.conj(e))
        cands.append(1j * e + B @ np.conj(1j * e))
    C = np.array(cands).T  # m x 2m complex, columns fixed vectors
    stacked = np.vstack([C.real, C.imag])  # 2m x 2m real
    U, S, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(S > 1e-8 * S[0]))
    if rank != m:
        raise NumericalError("conjugation basis failure")
    Y = U[:m, :m] + 1j * U[m:, :m]
    # columns of Y are orthonormal in the complex inner product because the
    # fixed subspace has a real-valued Gram
    out = V @ Y
    for j in range(out.shape[1]):
        resid = K @ np.conj(out[:, j]) - lam * out[:, j]
        if np.linalg.norm(resid) > 1e-7 * max(1.0, lam):
            raise NumericalError("conjugation basis failure")
    return out


def _concentrate_g(fixed: np.ndarray, d_g: np.ndarray) -> np.ndarray:
    """Real rotation making all but the first g-coordinate of a cluster zero.

    Inside a conjugation-fixed cluster the coordinates (g, e_k) share one
    phase (their pairwise conjugate products are real), so a real orthogonal
    rotation can concentrate them on one basis vector.  This keeps the flow
    matrix drift confined to a single entry of the cluster, which preserves
    the precision of the near-real eigenvalue track for large times.
    """
    b = np.array([np.vdot(fixed[:, k], d_g) for k in range(fixed.shape[1])])
    if np.max(np.abs(b)) == 0.0:
        return fixed
    k0 = int(np.argmax(np.abs(b)))
    phase = b[k0] / abs(b[k0])
    r = (b / phase).real  # signed real coordinate vector
    m = fixed.shape[1]
    R = np.eye(m)
    R[:, 0] = r / np.linalg.norm(r)
    # complete to an orthonormal real basis
    Q, _ = np.linalg.qr(R)
    if np.dot(Q[:, 0], R[:, 0]) < 0:
        Q = -Q
    return fixed @ Q


def _t_matrix_f(rb: RangeBasis, g_coords: np.ndarray) -> np.ndarray:
    """Infinitesimal shift in the partial-fraction basis.

    T(1/(x-p)^l) = 1/(x-p)^(l-1) + p/(x-p)^l for l >= 2; for l = 1 the
    produced constant cancels against Lambda(f) b_u = Lambda(f)(1 - g),
    leaving p/(x-p) + g.
    """
    n = rb.size
    pos = {}
    for a, (pole, l) in enumerate(rb.index):
        pos[(pole, l)] = a
    T = np.zeros((n, n), dtype=complex)
    for a, (pole, l) in enumerate(rb.index):
        T[a, a] += pole
        if l >= 2:
            T[pos[(pole, l - 1)], a] += 1.0
        else:
            T[:, a] += g_coords
    return T


def eigendecompose(u: HardyRational, rank_tol: float = RANK_RTOL) -> SpectralDecomposition:
    """Full spectral data of the squared Hankel operator of u.

    With the default `rank_tol` a numerically rank-deficient symbol is
    rejected.  Passing a larger tolerance instead truncates the channels
    with lambda below rank_tol * lambda_max; tangent-perturbation
    diagnostics use this to discard the O(h^2)-sized spurious channels of
    u + h * (tangent field).
    """
    rb = build_range_basis(u)
    M = hankel_matrix(u, rb)
    K = _orthonormal_hankel(rb, M)
    H2 = K @ K.conj().T
    H2 = 0.5 * (H2 + H2.conj().T)
    vals, vecs = np.linalg.eigh(H2)
    vals = np.maximum(vals, 0.0)
    lambdas = np.sqrt(vals)
    if lambdas[0] < rank_tol * lambdas[-1]:
        if rank_tol <= RANK_RTOL:
            raise PreconditionError("numerically rank-deficient symbol")
        keep = lambdas >= rank_tol * lambdas[-1]
        vals = vals[keep]
        lambdas = lambdas[keep]
        vecs = vecs[:, keep]
    clusters = _cluster_indices(vals)

    bl = blaschke(u)
    g_coords_f = function_coords(bl.g, rb)
    d_g = rb.chol.conj().T @ g_coords_f

    evecs = np.empty_like(vecs)
    for grp in clusters:
        if len(grp) == 1:
            j = grp[0]
            v = vecs[:, j]
            c = np.vdot(v, K @ np.conj(v))
            theta = math.atan2(c.imag, c.real)
            if theta < 0:
                theta += 2.0 * math.pi
            e = np.exp(1j * theta / 2.0) * v
            resid = K @ np.conj(e) - abs(c) * e
            if np.linalg.norm(resid) > 1e-8 * max(1.0, lambdas[-1]):
                raise NumericalError("eigenvector phase fixing failed")
            evecs[:, j] = e
        else:
            lam = float(np.mean(lambdas[list(grp)]))
            V = vecs[:, list(grp)]
            fixed = _fixed_subspace_basis(K, V, lam)
            fixed = _concentrate_g(fixed, d_g)
            for col, j in enumerate(grp):
                evecs[:, j] = fixed[:, col]

    betas = np.array([np.vdot(evecs[:, j], d_g) for j in range(evecs.shape[1])])
    nus = np.abs(betas)
    gnorm = float(np.linalg.norm(d_g))
    two_phis = np.where(
        nus > NU_RTOL * max(gnorm, 1e-300),
        np.mod(2.0 * np.angle(betas), 2.0 * math.pi),
        0.0,
    )

    Tf = _t_matrix_f(rb, g_coords_f)
    Linv = np.linalg.inv(rb.chol)
    Tq = rb.chol.conj().T @ Tf @ Linv.conj().T
    Te = evecs.conj().T @ Tq @ evecs
    gammas = np.real(np.diag(Te))

    dec = SpectralDecomposition(
        u=u,
        rb=rb,
        bl=bl,
        lambdas=lambdas,
        evecs=evecs,
        betas=betas,
        nus=nus,
        two_phis=two_phis,
        gammas=gammas,
        clusters=clusters,
        genericity="",
    )
    genericity = classify_genericity(dec)
    object.__setattr__(dec, "genericity", genericity)
    return dec


def t_matrix(u: HardyRational, dec: SpectralDecomposition) -> TMatrix:
    """Matrix of the infinitesimal shift in the eigenbasis, plus its adjoint."""
    g_coords_f = function_coords(dec.bl.g, dec.rb)
    Tf = _t_matrix_f(dec.rb, g_coords_f)
    # closure check: columns of Tf must stay inside the range basis, which is
    # structural here; verify the eigen-adjoint identity instead
    Linv = np.linalg.inv(dec.rb.chol)
    Tq = dec.rb.chol.conj().T @ Tf @ Linv.conj().T
    Te = dec.evecs.conj().T @ Tq @ dec.evecs
    scale = max(1.0, float(np.max(np.abs(Te))))
    w = dec.betas
    gap = Te - (Te.conj().T - (1.0 / (2j * math.pi)) * np.outer(w, w.conj()))
    if np.max(np.abs(gap)) > 1e-8 * scale:
        raise NumericalError("shift closure violated")
    return TMatrix(Te, Te.conj().T)


def classify_genericity(dec: SpectralDecomposition) -> str:
    """strongly_generic / generic / non_generic per eigenvalue and nu gaps."""
    if any(len(g) > 1 for g in dec.clusters):
        return "non_generic"
    lam2 = dec.lambdas**2
    gaps = np.diff(lam2)
    if np.any(gaps <= CLUSTER_RTOL * lam2[-1]):
        return "non_generic"
    gnorm = float(np.linalg.norm(dec.nus))
    if np.any(dec.nus <= NU_RTOL * max(gnorm, 1e-300)):
        return "non_generic"
    speeds = np.sort(lam2 * dec.nus**2)
    if np.any(np.diff(speeds) <= CLUSTER_RTOL * speeds[-1]):
        return "generic"
    return "strongly_generic"


def eigenfunction(dec: SpectralDecomposition, j: int) -> HardyRational:
    """The eigenvector e_j as an actual rational function."""
    d = dec.evecs[:, j]
    c = np.linalg.solve(dec.rb.chol.conj().T, d)
    return coords_to_function(c, dec.rb)


def decomposition_to_json(dec: SpectralDecomposition) -> dict:
    return {
        "lambda": [float(x) for x in dec.lambdas],
        "nu": [float(x) for x in dec.nus],
        "two_phi": [float(x) for x in dec.two_phis],
        "gamma": [float(x) for x in dec.gammas],
        "evecs": [
            [[z.real, z.imag] for z in dec.evecs[:, j]] for j in range(dec.size)
        ],
        "genericity": dec.genericity,
    }
