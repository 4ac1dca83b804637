"""Soliton resolution, the double-eigenvalue pathology, and Sobolev growth.

For strongly generic data the solution splits into one soliton per
eigenchannel,

    u(t, x) = sum_j e^{-i t lambda_j^2} C_j / (x - c_j t - p_j) + eps(t, x),

with amplitude C_j = i lambda_j conj(beta_j)^2 / (2 pi), center
p_j = Re (T e_j, e_j) - i nu_j^2 / (4 pi), speed c_j = lambda_j^2 nu_j^2
/ (2 pi) and frequency lambda_j^2; the remainder decays like 1/t in every
Sobolev norm.  The overall amplitude sign is anchored by the rank-one case,
where the decomposition must be exact with eps identically zero.

A degree-2 symbol whose squared Hankel operator has a double eigenvalue
behaves differently: after rotating the eigenbasis so that the second
coordinate of g vanishes, the flow matrix is 2x2 with a single linear-drift
entry, its discriminant D(t) = A^2 t^2 + B t + C steers one eigenvalue to a
finite limit and the other to the real axis at rate 1/t^2, and the Sobolev
norms above the conserved 1/2 level grow like |t|^(2s-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .hankel import SpectralDecomposition, TMatrix, eigendecompose, t_matrix
from .flow import recover_rational, s_matrix
from .rational import (
    HardyRational,
    RationalFn,
    h_half_norm,
    homogeneous_sobolev_norm,
    l2_norm,
    simple_pole,
)

__all__ = [
    "SolitonParams",
    "ResolutionReport",
    "NonGenericReport",
    "soliton_params_from_spectrum",
    "soliton_term",
    "remainder_norms",
    "nongeneric_analysis",
    "growth_fit",
    "fit_power_law",
]


@dataclass(frozen=True)
class SolitonParams:
    """One traveling-wave channel e^{-i omega t} C / (x - c t - p)."""

    amplitude: complex
    pole: complex
    speed: float
    frequency: float


@dataclass(frozen=True)
class ResolutionReport:
    solitons: tuple[SolitonParams, ...]
    times: tuple[float, ...]
    s_values: tuple[float, ...]
    norms: np.ndarray          # len(times) x len(s_values)
    exponents: tuple[float, ...]
    direction: str             # "forward" or "backward"


@dataclass(frozen=True)
class NonGenericReport:
    eigenvalue: float          # the double lambda^2
    soliton: SolitonParams
    drift_a: float             # A = lambda^2 nu_1^2 / (2 pi)
    disc_b: complex
    disc_c: complex
    times: tuple[float, ...]
    e1_track: tuple[complex, ...]
    e2_track: tuple[complex, ...]
    e2_imag_exponent: float    # fitted decay rate of Im E_2 (expect -2)


def soliton_params_from_spectrum(dec: SpectralDecomposition,
                                 tmat: TMatrix) -> tuple[SolitonParams, ...]:
    """One soliton per channel; requires strongly generic data."""
    if dec.genericity != "strongly_generic":
        raise PreconditionError("soliton resolution requires strongly generic data")
    out = []
    for j in range(dec.size):
        lam = float(dec.lambdas[j])
        beta = dec.betas[j]
        nu = float(dec.nus[j])
        C = 1j * lam * np.conj(beta) ** 2 / (2.0 * math.pi)
        p = complex(tmat.t[j, j].real, -nu**2 / (4.0 * math.pi))
        out.append(SolitonParams(complex(C), p,
                                 lam**2 * nu**2 / (2.0 * math.pi), lam**2))
    return tuple(out)


def soliton_term(sp: SolitonParams, t: float) -> HardyRational:
    coeff = sp.amplitude * np.exp(-1j * sp.frequency * t)
    return simple_pole(complex(coeff), sp.pole + sp.speed * t)


def fit_power_law(times, values) -> tuple[float, float]:
    """Slope and intercept of log |value| against log |t|."""
    ts = np.log(np.abs(np.asarray(times, dtype=float)))
    vs = np.log(np.asarray(values, dtype=float))
    tbar = ts.mean()
    vbar = vs.mean()
    slope = float(np.dot(ts - tbar, vs - vbar) / np.dot(ts - tbar, ts - tbar))
    return slope, float(vbar - slope * tbar)


def _fit_decay(times, values, min_points: int = 5):
    """Power-law fit over all provided samples.

    The 1/t remainder carries bounded prefactors oscillating on the O(1)
    timescale 4 pi / (lambda gaps); log-spaced samples alias them, so the
    slope needs many samples (about a hundred over two decades) to average
    out.  An identically-zero remainder (exact soliton) reports -inf.
    """
    t = np.abs(np.asarray(times, dtype=float))
    if len(t) < min_points:
        raise PreconditionError("insufficient samples")
    vals = np.asarray(values, dtype=float)
    if np.max(vals) < 1e-13:
        return float("-inf"), float("-inf")
    return fit_power_law(t, np.maximum(vals, 1e-300))


def _sobolev_combo(f: HardyRational, s: float) -> float:
    """sqrt(L2^2 + Hdot_s^2): the inhomogeneous-norm convention used for
    fits (exact via the Gamma formula; equivalent to the (1+xi^2)^s weight)."""
    if s == 0:
        return l2_norm(f)
    a = l2_norm(f)
    b = homogeneous_sobolev_norm(f, s)
    return math.sqrt(a * a + b * b)


def remainder_norms(u0: HardyRational, times, s_values) -> ResolutionReport:
    """Track ||u(t) - sum of solitons||_{H^s} and fit the decay exponents."""
    times = tuple(float(t) for t in times)
    if any(t == 0 for t in times):
        raise PreconditionError("remainder decay is measured at nonzero times")
    if len({t > 0 for t in times}) != 1:
        raise PreconditionError("times must share one sign (one direction tag)")
    dec = eigendecompose(u0)
    tmat = t_matrix(u0, dec)
    sols = soliton_params_from_spectrum(dec, tmat)
    s_values = tuple(float(s) for s in s_values)
    norms = np.empty((len(times), len(s_values)))
    for i, t in enumerate(times):
        ut = recover_rational(dec, tmat, t)
        eps: RationalFn = ut
        for sp in sols:
            eps = eps - soliton_term(sp, t)
        for k, s in enumerate(s_values):
            norms[i, k] = _sobolev_combo(HardyRational(eps.terms, ()), s)
    exponents = tuple(
        _fit_decay(times, norms[:, k])[0] for k in range(len(s_values))
    )
    direction = "forward" if times[0] > 0 else "backward"
    return ResolutionReport(sols, times, s_values, norms, exponents, direction)


def _rotate_double_basis(dec: SpectralDecomposition):
    """Real rotation of a double eigenspace making the second g-coordinate zero.

    Within a conjugation-fixed eigenbasis the products conj(beta_1) beta_2
    are real, so beta_j = e^{i theta} r_j with real r_j, and the real
    rotation by (r_1, r_2)/|r| preserves the antilinear eigenrelation.
    """
    b = dec.betas
    r1, r2 = abs(b[0]), abs(b[1])
    if r1 == 0 and r2 == 0:
        raise PreconditionError("zero symbol has no Blaschke coordinates")
    cross = np.conj(b[0]) * b[1]
    sign = 1.0 if cross.real >= 0 else -1.0
    if r1 == 0:
        theta = np.angle(b[1])
        r2 *= 1.0
    else:
        theta = np.angle(b[0])
        r2 *= sign
    rho = math.hypot(r1, r2)
    R = np.array([[r1 / rho, r2 / rho], [r2 / rho, -r1 / rho]])
    return R, theta, rho


def nongeneric_analysis(u0: HardyRational, times=None) -> NonGenericReport:
    """Pole-track analysis for a degree-2 symbol with a double eigenvalue."""
    dec = eigendecompose(u0)
    if dec.size != 2 or len(dec.clusters) != 1 or len(dec.clusters[0]) != 2:
        raise PreconditionError(
            "analysis requires a degree-2 symbol with an exact double eigenvalue"
        )
    tmat = t_matrix(u0, dec)
    R, _theta, _rho = _rotate_double_basis(dec)
    Trot = R.T @ tmat.t @ R
    betas = R.T @ dec.betas
    if abs(betas[1]) > 1e-9 * abs(betas[0]):
        raise PreconditionError("basis rotation failed to annihilate beta_2")
    lam = float(dec.lambdas[0])
    nu1 = abs(betas[0])
    c1, c2 = Trot[0, 0], Trot[1, 0]
    d1, d2 = Trot[0, 1], Trot[1, 1]
    A = lam**2 * nu1**2 / (2.0 * math.pi)
    B = (lam**2 * nu1**2 / math.pi) * (c1 - d2)
    Cc = (c1 - d2) ** 2 + 4.0 * c2 * d1

    Csol = 1j * lam * np.conj(betas[0]) ** 2 / (2.0 * math.pi)
    sol = SolitonParams(
        complex(Csol),
        complex(c1.real, -nu1**2 / (4.0 * math.pi)),
        A,
        lam**2,
    )

    if times is None:
        times = tuple(float(v) for v in np.geomspace(1e2, 1e4, 17))
    times = tuple(float(t) for t in times)
    e1s, e2s = [], []
    for t in times:
        disc = (A * t) ** 2 + B * t + Cc
        root = np.sqrt(complex(disc))
        if root.real * (A * t) < 0:
            root = -root
        tr = (A * t + c1 + d2)
        e1s.append(complex((tr + root) / 2.0))
        e2s.append(complex((tr - root) / 2.0))
        # consistency with the assembled flow matrix
        ev = np.linalg.eigvals(s_matrix(dec, tmat, t).s)
        got = sorted(ev, key=lambda z: abs(z - e1s[-1]))
        if abs(got[0] - e1s[-1]) > 1e-6 * max(1.0, abs(e1s[-1])):
            raise PreconditionError("closed-form eigenvalue track disagrees with S(t)")
    exponent, _ = fit_power_law(times, [abs(z.imag) for z in e2s])
    return NonGenericReport(
        lam**2, sol, A, complex(B), complex(Cc),
        times, tuple(e1s), tuple(e2s), float(exponent),
    )


def growth_fit(u0: HardyRational, s: float, times) -> dict:
    """Fit the growth slope of the homogeneous H^s norm along the flow.

    Returns the fitted slope of log ||u(t)||_{Hdot^s} against log |t| plus
    the relative drift of the conserved H^(1/2) quantity over the same
    times.  For the double-eigenvalue class the slope approaches 2s-1 for
    s > 1/2 and 0 at the conserved s = 1/2.
    """
    times = tuple(float(t) for t in times)
    if len(times) < 5:
        raise PreconditionError("insufficient samples")
    dec = eigendecompose(u0)
    tmat = t_matrix(u0, dec)
    vals = []
    h_half = []
    for t in times:
        ut = recover_rational(dec, tmat, t)
        vals.append(homogeneous_sobolev_norm(ut, s))
        h_half.append(h_half_norm(ut))
    slope, intercept = fit_power_law(times, vals)
    ref = h_half_norm(u0)
    drift = max(abs(v - ref) for v in h_half) / ref
    return {
        "s": float(s),
        "slope": slope,
        "intercept": intercept,
        "h_half_drift": float(drift),
        "norms": vals,
        "times": times,
    }
