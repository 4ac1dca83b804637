"""Closed-form time evolution through the flow matrix S(t).

With spectral data (lambda_j, beta_j) and the shift matrix T of the initial
symbol, S(t) is assembled entrywise: oscillatory off the eigenvalue cluster,
linear drift (lambda_j^2/2pi) conj(beta_j) beta_k t + (T e_j, e_k) inside it.
The solution is the resolvent pairing

    u(t, x) = -(i/2pi) * (u0, W(t) (S(t) - x I)^{-1} W(t) g0),
    W(t) = diag exp(i t lambda_j^2 / 2),

which, written out for a point z in the closed upper half-plane, is

    u(t, z) = -(i/2pi) * (Lam conj(w))^T (conj(S) - z I)^{-1} conj(w),
    w = W(t) beta,  Lam = diag(lambda).

The sign differs from some statements of the pairing in the literature; it
is pinned here by the exact single-soliton solution and is consistent with
the soliton-resolution amplitudes C_j = i lambda_j conj(beta_j)^2 / (2 pi).

Poles of u(t) are the complex conjugates of the eigenvalues of S(t); the
recovery path eigendecomposes conj(S) and reads residues off the bilinear
expansion, falling back to a Schur-plus-least-squares fit when S(t) is
numerically defective (multiple poles).
"""

from __future__ import annotations

import cmath
import math

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError
from .hankel import (
    SpectralDecomposition,
    TMatrix,
    eigendecompose,
    t_matrix,
)
from .rational import (
    HardyRational,
    h_half_norm,
    hardy_from_terms,
    homogeneous_sobolev_norm,
    inner_product,
    l2_norm,
)

# Relative eigenvalue separation required for the direct recovery path.
# Eigenvalues of a numerically defective matrix scatter like eps^(1/m), about
# 2e-8 already for a double pole, so the gate must sit well above that.
EIG_SEP_RTOL = 20.0 * (2.3e-16) ** (1.0 / 3.0)
RECOVER_TOL = 1e-9        # postcondition: recovered rational vs resolvent values
FIT_TOL = 1e-7            # fallback least-squares residual bound

__all__ = [
    "FlowMatrix",
    "s_matrix",
    "evolve_eval",
    "recover_rational",
    "conserved_quantities",
    "spectral_conserved",
    "trajectory",
    "fit_partial_fractions",
]


@dataclass(frozen=True)
class FlowMatrix:
    """S(t) with the diagonal unitary W(t) and the time stamp."""

    s: np.ndarray
    w_diag: np.ndarray
    t: float


def s_matrix(dec: SpectralDecomposition, tmat: TMatrix, t: float) -> FlowMatrix:
    """Assemble S(t) in the eigenbasis; S(0) is the shift matrix itself."""
    n = dec.size
    lam = dec.lambdas
    lam2 = lam**2
    beta = dec.betas
    S = np.empty((n, n), dtype=complex)
    for j in range(n):
        grp = dec.cluster_of(j)
        for k in range(n):
            if k in grp:
                S[k, j] = (lam2[j] / (2.0 * math.pi)) * np.conj(beta[j]) * beta[k] * t \
                    + tmat.t[k, j]
            else:
                osc1 = cmath.exp(0.5j * t * (lam2[k] - lam2[j]))
                osc2 = cmath.exp(0.5j * t * (lam2[j] - lam2[k]))
                S[k, j] = lam[j] / (2j * math.pi * (lam2[k] - lam2[j])) * (
                    lam[j] * osc1 * np.conj(beta[j]) * beta[k]
                    - lam[k] * osc2 * beta[j] * np.conj(beta[k])
                )
    w = np.exp(0.5j * t * lam2)
    return FlowMatrix(S, w, float(t))


def evolve_eval(dec: SpectralDecomposition, tmat: TMatrix, t: float, x) -> complex:
    """Value of the solution at time t and a point x with Im x >= 0."""
    fm = s_matrix(dec, tmat, t)
    w = fm.w_diag * dec.betas
    A = np.conj(fm.s) - complex(x) * np.eye(dec.size)
    rhs = np.conj(w)
    y = np.linalg.solve(A, rhs)
    resid = np.linalg.norm(A @ y - rhs)
    if resid > 1e-10 * max(1.0, np.linalg.norm(rhs)):
        raise NumericalError("resolvent solve failed")
    return complex(-0.5j / math.pi * np.dot(dec.lambdas * rhs, y))


def fit_partial_fractions(poles_mults, xs, values) -> HardyRational:
    """Least-squares partial fractions with prescribed poles/multiplicities."""
    cols = []
    layout = []
    xs = np.asarray(xs, dtype=complex)
    for p, m in poles_mults:
        for l in range(1, m + 1):
            cols.append(1.0 / (xs - p) ** l)
            layout.append((p, l))
    A = np.array(cols).T
    sol, _res, _rk, _sv = np.linalg.lstsq(A, np.asarray(values, dtype=complex),
                                          rcond=None)
    resid = np.linalg.norm(A @ sol - values)
    scale = max(1.0, float(np.linalg.norm(values)))
    if resid > FIT_TOL * scale:
        raise NumericalError(
            f"defective recovery: fit residual {resid:.3e} on scale {scale:.3e}"
        )
    pairs: dict[complex, list[complex]] = {}
    for (p, l), c in zip(layout, sol):
        stack = pairs.setdefault(p, [])
        while len(stack) < l:
            stack.append(0.0j)
        stack[l - 1] += complex(c)
    return hardy_from_terms(list(pairs.items()))


def _cluster_poles(vals: np.ndarray) -> list[tuple[complex, int]]:
    scale = max(1.0, float(np.max(np.abs(vals))))
    tol = EIG_SEP_RTOL * scale
    groups: list[tuple[complex, int]] = []
    for v in sorted(vals, key=lambda z: (z.real, z.imag)):
        for i, (c, m) in enumerate(groups):
            if abs(v - c) <= tol:
                groups[i] = ((c * m + v) / (m + 1), m + 1)
                break
        else:
            groups.append((complex(v), 1))
    return groups


def _eig2x2(A: np.ndarray):
    """Eigenpairs of a 2x2 matrix via the explicit quadratic formula.

    The discriminant is formed as (a-d)^2 + 4bc, which avoids the large
    cancellation of tr^2 - 4 det when one eigenvalue drifts linearly in
    time; the accuracy of the small eigenvalue's imaginary part is what
    limits Sobolev norms of recovered symbols with a near-real pole.
    """
    a, b = A[0, 0], A[0, 1]
    c, d = A[1, 0], A[1, 1]
    root = np.sqrt((a - d) ** 2 + 4.0 * b * c)
    if (np.conj(a - d) * root).real < 0:
        root = -root
    denom = (a - d) + root
    if abs(denom) > 1e-30:
        delta = -2.0 * b * c / denom   # = (a-d)/2 - root/2, cancellation-free
    else:
        delta = 0.5 * (a - d) - 0.5 * root
    e1 = a - delta
    e2 = d + delta
    vecs = []
    for e in (e1, e2):
        v1 = np.array([b, e - a])
        v2 = np.array([e - d, c])
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        n = np.linalg.norm(v)
        vecs.append(v / n if n > 0 else np.array([1.0, 0.0]))
    return np.array([e1, e2]), np.array(vecs).T


def recover_rational(dec: SpectralDecomposition, tmat: TMatrix, t: float) -> HardyRational:
    """The solution at time t as an exact element of the rational class."""
    fm = s_matrix(dec, tmat, t)
    w = fm.w_diag * dec.betas
    Sc = np.conj(fm.s)
    a = dec.lambdas * np.conj(w)
    evals = _eig2x2(Sc)[0] if dec.size == 2 else np.linalg.eigvals(Sc)
    scale = max(1.0, float(np.max(np.abs(evals))))
    seps = [
        abs(evals[i] - evals[j])
        for i in range(len(evals))
        for j in range(i + 1, len(evals))
    ]
    direct = (not seps) or min(seps) > EIG_SEP_RTOL * scale

    if direct:
        E, V = _eig2x2(Sc) if dec.size == 2 else np.linalg.eig(Sc)
        left = a @ V
        right = np.linalg.solve(V, np.conj(w))
        pairs = []
        for m in range(dec.size):
            coeff = 0.5j / math.pi * left[m] * right[m]
            pairs.append((complex(E[m]), [coeff]))
        out = hardy_from_terms(pairs)
    else:
        Tm, _Z = _schur(Sc)
        poles = _cluster_poles(np.diag(Tm))
        radius = 2.0 * scale + 1.0
        k = np.arange(4 * dec.size)
        xs = radius * np.cos((2 * k + 1) * math.pi / (2 * len(k)))
        vals = np.array([evolve_eval(dec, tmat, t, x) for x in xs])
        out = fit_partial_fractions(poles, xs, vals)

    check_x = np.linspace(-2.3 * scale - 1.0, 2.3 * scale + 1.0, 20)
    ref = np.array([evolve_eval(dec, tmat, t, x) for x in check_x])
    got = out.evaluate(check_x)
    err = float(np.max(np.abs(got - ref)))
    if err > RECOVER_TOL * max(1.0, float(np.max(np.abs(ref)))):
        raise NumericalError(
            f"defective recovery: pointwise mismatch {err:.3e} at t={t}"
        )
    return out


def _schur(A: np.ndarray):
    from scipy.linalg import schur

    return schur(A, output="complex")


def spectral_conserved(dec: SpectralDecomposition, kmax: int) -> list[float]:
    """[J_2, J_4, ..., J_{2 kmax}] from the spectral data."""
    if kmax < 1:
        raise PreconditionError("kmax must be >= 1")
    return [float(np.sum(dec.lambdas ** (2 * k) * dec.nus**2)) for k in range(1, kmax + 1)]


def conserved_quantities(u: HardyRational, kmax: int) -> list[float]:
    """J_{2k}(u) = sum_j lambda_j^{2k} nu_j^2 for k = 1..kmax."""
    if kmax < 1:
        raise PreconditionError("kmax must be >= 1")
    if u.is_zero():
        return [0.0] * kmax
    return spectral_conserved(eigendecompose(u), kmax)


_CORE_OBSERVABLES = ("poles", "coefficients", "conserved", "norms")


def trajectory(
    u0: HardyRational,
    times,
    observables: tuple[str, ...] = _CORE_OBSERVABLES,
    hs: tuple[float, ...] = (),
) -> list[dict]:
    """Evolve u0 and tabulate observables at each requested time.

    Conserved quantities and norms are recomputed from the recovered
    rational at each time (not copied from t=0), so the table doubles as a
    conservation regression.  `hs` adds homogeneous Sobolev norms.
    """
    known = set(_CORE_OBSERVABLES) | {"solitons"}
    for ob in observables:
        if ob not in known:
            raise PreconditionError(f"unknown observable {ob!r}")
    dec = eigendecompose(u0)
    tmat = t_matrix(u0, dec)
    params = None
    if "solitons" in observables:
        from .asymptotics import soliton_params_from_spectrum

        params = soliton_params_from_spectrum(dec, tmat)
    rows = []
    for t in times:
        ut = recover_rational(dec, tmat, float(t))
        row: dict = {"time": float(t)}
        if "poles" in observables or "coefficients" in observables:
            flat_poles = []
            flat_coeffs = []
            for term in ut.terms:
                for l, c in enumerate(term.coeffs, start=1):
                    flat_poles.append(term.pole)
                    flat_coeffs.append(c)
            if "poles" in observables:
                row["poles"] = flat_poles
            if "coefficients" in observables:
                row["coefficients"] = flat_coeffs
        if "conserved" in observables:
            dect = eigendecompose(ut)
            row["J"] = spectral_conserved(dect, 4)
        if "norms" in observables:
            row["L2"] = l2_norm(ut)
            row["H12"] = h_half_norm(ut)
            for s in hs:
                row[f"Hdot{s:g}"] = homogeneous_sobolev_norm(ut, float(s))
        if "solitons" in observables:
            from .asymptotics import soliton_term

            rem = ut
            for sp in params:
                rem = rem - soliton_term(sp, float(t))
            row["remainder_L2"] = math.sqrt(max(0.0, inner_product(rem, rem).real))
        rows.append(row)
    return rows
