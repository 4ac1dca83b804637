import math

import numpy as np
import pytest

from szego.errors import PreconditionError
from szego.flow import (
    conserved_quantities,
    evolve_eval,
    recover_rational,
    s_matrix,
    spectral_conserved,
    trajectory,
)
from szego.hankel import eigendecompose, t_matrix
from szego.rational import (
    h_half_norm,
    hardy_from_terms,
    inner_product,
    simple_pole,
    zero,
)


def dec_tm(u):
    dec = eigendecompose(u)
    return dec, t_matrix(u, dec)


class TestSMatrix:
    def test_zero_time_is_shift_matrix(self, generic_m2):
        dec, tm = dec_tm(generic_m2)
        fm = s_matrix(dec, tm, 0.0)
        assert np.max(np.abs(fm.s - tm.t)) < 1e-12
        assert np.allclose(fm.w_diag, 1.0)

    def test_rank_one_track(self, soliton_symbol):
        dec, tm = dec_tm(soliton_symbol)
        fm = s_matrix(dec, tm, 3.0)
        assert abs(fm.s[0, 0] - (1.5 + 1j)) < 1e-13
        assert abs(fm.w_diag[0] - np.exp(1j * 3.0 * 0.25 / 2)) < 1e-13

    def test_double_eigenvalue_drift_pattern(self, double_eig_symbol):
        # in the rotated cluster basis only the beta-carrying entry drifts
        dec, tm = dec_tm(double_eig_symbol)
        d = s_matrix(dec, tm, 5.0).s - s_matrix(dec, tm, 0.0).s
        assert abs(d[0, 0]) > 0.1
        assert max(abs(d[0, 1]), abs(d[1, 0]), abs(d[1, 1])) < 1e-12

    def test_rank_one_defect_along_flow(self, generic_m2):
        dec, tm = dec_tm(generic_m2)
        for t in (0.7, -11.0, 123.0):
            fm = s_matrix(dec, tm, t)
            w = fm.w_diag * dec.betas
            gap = fm.s - (fm.s.conj().T - np.outer(w, np.conj(w)) / (2j * math.pi))
            assert np.max(np.abs(gap)) < 1e-10
            assert np.all(np.linalg.eigvals(fm.s).imag > 0)

    def test_time_derivative_formula(self, generic_m2):
        dec, tm = dec_tm(generic_m2)
        h, t0 = 1e-5, 1.234
        fd = (s_matrix(dec, tm, t0 + h).s - s_matrix(dec, tm, t0 - h).s) / (2 * h)
        w = s_matrix(dec, tm, t0).w_diag * dec.betas
        lam = dec.lambdas
        n = dec.size
        an = np.empty((n, n), dtype=complex)
        for j in range(n):
            an[:, j] = (lam[j] ** 2 * np.conj(w[j]) * w
                        + lam[j] * w[j] * lam * np.conj(w)) / (4 * math.pi)
        assert np.max(np.abs(fd - an)) < 1e-6


class TestEvolveEval:
    def test_reproduces_initial_datum(self, double_eig_symbol):
        dec, tm = dec_tm(double_eig_symbol)
        xs = np.linspace(-7, 7, 20)
        got = np.array([evolve_eval(dec, tm, 0.0, x) for x in xs])
        assert np.max(np.abs(got - double_eig_symbol.evaluate(xs))) < 1e-10

    def test_exact_soliton(self, soliton_symbol):
        dec, tm = dec_tm(soliton_symbol)
        for t in (0.0, 1.0, -2.7, 5.3):
            for x in (0.0, 1.3, 0.5 + 0.9j):
                got = evolve_eval(dec, tm, t, x)
                want = np.exp(-1j * t / 4) / (x - t / 2 + 1j)
                assert abs(got - want) < 1e-12


class TestRecoverRational:
    def test_soliton_closed_form(self, soliton_symbol):
        dec, tm = dec_tm(soliton_symbol)
        ut = recover_rational(dec, tm, 2.0)
        assert abs(ut.terms[0].pole - (1.0 - 1j)) < 1e-12
        assert abs(ut.terms[0].coeffs[0] - np.exp(-0.5j)) < 1e-12

    def test_identity_at_zero(self, generic_m2):
        dec, tm = dec_tm(generic_m2)
        u0 = recover_rational(dec, tm, 0.0)
        xs = np.linspace(-5, 5, 9)
        assert np.max(np.abs(u0.evaluate(xs) - generic_m2.evaluate(xs))) < 1e-11

    def test_pole_eigenvalue_duality(self, generic_m2):
        dec, tm = dec_tm(generic_m2)
        for t in (0.9, -7.7):
            ut = recover_rational(dec, tm, t)
            poles = sorted((tt.pole for tt in ut.terms), key=lambda z: z.real)
            eigs = sorted(np.conj(np.linalg.eigvals(s_matrix(dec, tm, t).s)),
                          key=lambda z: z.real)
            assert max(abs(a - b) for a, b in zip(poles, eigs)) < 1e-8

    def test_degenerate_shift_matrix_fallback(self):
        # 1/(x+i)^2 has a defective shift matrix at t = 0 (double pole)
        u = hardy_from_terms([(-1j, [0.0, 1.0])])
        dec, tm = dec_tm(u)
        u0 = recover_rational(dec, tm, 0.0)
        assert u0.terms[0].multiplicity == 2
        xs = np.linspace(-4, 4, 9)
        assert np.max(np.abs(u0.evaluate(xs) - u.evaluate(xs))) < 1e-10
        # the double pole splits immediately under the flow
        u1 = recover_rational(dec, tm, 0.5)
        assert sorted(t.multiplicity for t in u1.terms) == [1, 1]

    def test_double_eigenvalue_pole_tracks(self, double_eig_symbol):
        # one pole settles at -i nu_1^2/(4 pi) = -3i, the other approaches
        # the axis like -13.5/t^2
        dec, tm = dec_tm(double_eig_symbol)
        for t in (1e2, 1e3):
            ut = recover_rational(dec, tm, t)
            ims = sorted(tt.pole.imag for tt in ut.terms)
            assert abs(ims[0] + 3.0) < 20.0 / t**2
            assert abs(ims[1] * t**2 + 13.5) < 0.1 * 13.5


class TestConservedQuantities:
    def test_rank_one_values(self, soliton_symbol):
        J = conserved_quantities(soliton_symbol, 2)
        assert abs(J[0] - math.pi) < 1e-12
        assert abs(J[1] - math.pi / 4) < 1e-12

    def test_zero_symbol(self):
        assert conserved_quantities(zero(), 3) == [0.0, 0.0, 0.0]

    def test_quadrature_cross_check(self, generic_m2):
        # J_2 = mass, J_4 = (1/2) int |u|^4, both by residue integrals
        J = conserved_quantities(generic_m2, 2)
        mass = inner_product(generic_m2, generic_m2).real
        q = generic_m2 * generic_m2.conj_reflect()
        quartic = inner_product(q, q.conj_reflect()).real
        assert abs(J[0] - mass) < 1e-9 * mass
        assert abs(J[1] - quartic / 2) < 1e-9 * quartic

    def test_conservation_along_flow(self, generic_m2):
        dec, tm = dec_tm(generic_m2)
        J0 = spectral_conserved(dec, 4)
        h0 = h_half_norm(generic_m2)
        for t in (-100.0, -3.0, 17.0, 100.0):
            ut = recover_rational(dec, tm, t)
            Jt = spectral_conserved(eigendecompose(ut), 4)
            assert max(abs(a - b) / abs(b) for a, b in zip(Jt, J0)) < 1e-9
            assert abs(h_half_norm(ut) - h0) / h0 < 1e-9

    def test_kmax_validation(self, soliton_symbol):
        with pytest.raises(PreconditionError):
            conserved_quantities(soliton_symbol, 0)


class TestTrajectory:
    def test_single_time_zero(self, generic_m2):
        rows = trajectory(generic_m2, [0.0])
        want = {t.pole for t in generic_m2.terms}
        got = set(rows[0]["poles"])
        assert all(min(abs(a - b) for b in want) < 1e-10 for a in got)
        assert abs(rows[0]["J"][0] - inner_product(generic_m2, generic_m2).real) < 1e-9

    def test_soliton_pole_line(self):
        C, p = 0.8 + 0.1j, -0.2 - 0.7j
        u = simple_pole(C, p)
        c = abs(C) ** 2 / (-2 * p.imag)
        rows = trajectory(u, [0.0, 1.0, 2.0], observables=("poles",))
        for t, row in zip((0.0, 1.0, 2.0), rows):
            assert abs(row["poles"][0] - (p + c * t)) < 1e-11

    def test_conserved_columns_flat(self, double_eig_symbol):
        rows = trajectory(double_eig_symbol, np.linspace(-5, 5, 7),
                          observables=("conserved", "norms"), hs=(1.0,))
        J0 = rows[0]["J"]
        for row in rows:
            assert max(abs(a - b) / abs(b) for a, b in zip(row["J"], J0)) < 1e-9
            assert "Hdot1" in row

    def test_unknown_observable(self, soliton_symbol):
        with pytest.raises(PreconditionError, match="unknown observable"):
            trajectory(soliton_symbol, [0.0], observables=("bogus",))
