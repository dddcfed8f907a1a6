import math

import numpy as np
import pytest

from kreinspec.errors import NonMonotoneError, UnsupportedChannel
from kreinspec import discretize as dz
from kreinspec import extensions as ext
from kreinspec.linalg import max_norm, sym_eigen_values

from oracles import tan_fixed_point_oracle, series_bessel_zero

PI = math.pi


class TestGridAndPotential:
    def test_grid_nodes(self):
        g = dz.Grid1D(0.0, 1.0, 9)
        assert g.h == pytest.approx(0.1)
        np.testing.assert_allclose(g.nodes(), 0.1 * np.arange(1, 10))

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            dz.Grid1D(0.0, 1.0, 7)
        with pytest.raises(ValueError):
            dz.Grid1D(1.0, 0.0, 10)

    def test_potential_kinds(self):
        g = dz.Grid1D(0.0, 1.0, 9)
        assert np.all(dz.PotentialSpec.zero().values_at(g) == 0.0)
        assert np.all(dz.PotentialSpec.of_constant(2.5).values_at(g) == 2.5)
        samples = list(range(9))
        np.testing.assert_array_equal(
            dz.PotentialSpec.sampled(samples).values_at(g), samples
        )

    def test_potential_validation(self):
        with pytest.raises(ValueError):
            dz.PotentialSpec.of_constant(-1.0)
        with pytest.raises(ValueError):
            dz.PotentialSpec.sampled([1.0, -2.0])

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "pot.csv"
        path.write_text("# potential\n1.0\n2.0\n0.5\n" + "0.0\n" * 6)
        spec = dz.PotentialSpec.from_csv(path, 9)
        assert spec.samples[:3] == (1.0, 2.0, 0.5)

    def test_csv_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0\nnot-a-number\n")
        with pytest.raises(ValueError, match="line 2"):
            dz.PotentialSpec.from_csv(path, 2)
        path.write_text("1.0\n2.0\n3.0\n")
        with pytest.raises(ValueError, match="expected 2"):
            dz.PotentialSpec.from_csv(path, 2)


class TestIntervalModel:
    def test_codimension_two(self):
        g = dz.Grid1D(0.0, PI, 40)
        model = dz.interval_model(g, dz.PotentialSpec.zero())
        assert model.codimension == 2
        assert ext.adjoint_kernel(model).shape == (40, 2)

    def test_dirichlet_bottom_near_one(self):
        g = dz.Grid1D(0.0, PI, 200)
        model = dz.interval_model(g, dz.PotentialSpec.zero())
        assert sym_eigen_values(model.A)[0] == pytest.approx(1.0, abs=5e-4)

    def test_constant_potential_shifts_bottom(self):
        g = dz.Grid1D(0.0, PI, 40)
        plain = dz.interval_model(g, dz.PotentialSpec.zero())
        shifted = dz.interval_model(g, dz.PotentialSpec.of_constant(5.0))
        lo_plain = sym_eigen_values(plain.A)[0]
        lo_shift = sym_eigen_values(shifted.A)[0]
        assert lo_shift == pytest.approx(lo_plain + 5.0, rel=1e-12)
        assert lo_shift >= 5.0 + lo_plain - 1e-10


class TestDiscreteKreinSpectrum:
    def test_first_values_converge_to_interval_limits(self):
        g = dz.Grid1D(0.0, PI, 160)
        model = dz.interval_model(g, dz.PotentialSpec.zero())
        spec = dz.discrete_krein_spectrum(model, 3)
        targets = [4.0, (2 * tan_fixed_point_oracle(1) / PI) ** 2, 16.0]
        for got, want in zip(spec.values(), targets):
            assert got == pytest.approx(want, rel=2e-2)
        assert spec.kernel_dim == 2

    def test_matrix_level_identity(self):
        # nonzero eigenvalues of the assembled soft extension equal the
        # pencil values up to conditioning noise, with no grid-size term
        g = dz.Grid1D(0.0, PI, 60)
        model = dz.interval_model(g, dz.PotentialSpec.zero())
        kvals = sym_eigen_values(ext.krein(model).matrix)[model.codimension:]
        pvals = dz.discrete_krein_spectrum(model, 58).flattened()
        rel = np.max(np.abs(kvals - pvals) / np.abs(pvals))
        assert rel <= 1e-9

    def test_matrix_level_identity_with_potential(self):
        g = dz.Grid1D(0.0, 2.0, 48)
        pot = dz.PotentialSpec.sampled(np.linspace(0.0, 3.0, 48))
        model = dz.interval_model(g, pot)
        kvals = sym_eigen_values(ext.krein(model).matrix)[2:]
        pvals = dz.discrete_krein_spectrum(model, 46).flattened()
        assert np.max(np.abs(kvals - pvals) / np.abs(pvals)) <= 1e-9

    def test_domain_monotonicity(self):
        # larger interval, pointwise smaller spectrum (inverse-square scaling)
        small = dz.interval_model(dz.Grid1D(0.0, PI, 80), dz.PotentialSpec.zero())
        large = dz.interval_model(dz.Grid1D(0.0, 1.5 * PI, 80), dz.PotentialSpec.zero())
        v_small = dz.discrete_krein_spectrum(small, 5).flattened()
        v_large = dz.discrete_krein_spectrum(large, 5).flattened()
        assert all(b < a for a, b in zip(v_small, v_large))

    def test_dirichlet_domination(self):
        g = dz.Grid1D(0.0, PI, 60)
        for pot in (dz.PotentialSpec.zero(), dz.PotentialSpec.of_constant(2.0)):
            model = dz.interval_model(g, pot)
            mu = sym_eigen_values(model.A)
            pv = ext.pencil_values(model)
            d = model.domain_dim
            assert np.all(mu[:d] <= pv * (1.0 + 1e-10))

    def test_rayleigh_quotient_consistency(self):
        g = dz.Grid1D(0.0, PI, 48)
        model = dz.interval_model(g, dz.PotentialSpec.zero())
        rep = ext.buckling_analysis(model)
        lam1 = rep.pencil_values[0]
        u1 = model.domain_basis @ rep.pencil_vectors[:, 0]
        a = model.A.array
        quotient = float((a @ u1) @ (a @ u1)) / float(u1 @ a @ u1)
        assert quotient == pytest.approx(lam1, rel=1e-10)


class TestRadialPencil:
    def test_unsupported_channel(self):
        with pytest.raises(UnsupportedChannel):
            dz.RadialChannelSpec(n=2, ell=0, radius=1.0, m=100, bc="dirichlet")

    def test_coefficient_values(self):
        assert dz.RadialChannelSpec(3, 0, 1.0, 50, "krein").coefficient == 0.0
        assert dz.RadialChannelSpec(2, 1, 1.0, 50, "krein").coefficient == pytest.approx(0.75)
        assert dz.RadialChannelSpec(3, 1, 1.0, 50, "krein").coefficient == pytest.approx(2.0)

    def test_mass_entries(self):
        hard = dz.radial_pencil(dz.RadialChannelSpec(3, 0, 1.0, 30, "dirichlet"))
        soft = dz.radial_pencil(dz.RadialChannelSpec(3, 0, 1.0, 30, "krein"))
        assert np.all(hard.mass == 1.0)
        assert np.all(soft.mass[:-1] == 1.0) and soft.mass[-1] == 0.5

    def test_pencil_matrices_consistent(self):
        spec = dz.RadialChannelSpec(3, 1, 2.0, 20, "krein")
        pencil = dz.radial_pencil(spec)
        k = pencil.k_matrix().array
        assert max_norm(k - k.T) == 0.0
        d, e = pencil.reduced_tridiagonal()
        root = np.sqrt(pencil.mass)
        rebuilt = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        direct = k / np.outer(root, root)
        direct[np.abs(direct) < 1e-300] = 0.0
        keep = np.abs(rebuilt) > 0.0
        np.testing.assert_allclose(rebuilt[keep], direct[keep], rtol=1e-14)

    def test_hard_channel_against_exact(self):
        # c = 0 channel is the plain second-difference operator on (0, R)
        ev = dz.radial_eigenvalues(dz.RadialChannelSpec(3, 0, 1.0, 2000, "dirichlet"), 2)
        assert ev[0] == pytest.approx(PI**2, rel=1e-3)
        assert ev[1] == pytest.approx(4 * PI**2, rel=1e-3)

    def test_soft_channel_against_tan_root(self):
        ev = dz.radial_eigenvalues(dz.RadialChannelSpec(3, 0, 1.0, 2000, "krein"), 1)
        assert ev[0] == pytest.approx(tan_fixed_point_oracle(1) ** 2, rel=5e-3)

    def test_disk_wave_channel_against_bessel(self):
        ev = dz.radial_eigenvalues(dz.RadialChannelSpec(2, 1, 1.0, 2000, "dirichlet"), 1)
        assert ev[0] == pytest.approx(series_bessel_zero(2, 1) ** 2, rel=5e-3)

    def test_zero_mode_is_discrete_kernel_vector(self):
        # the soft pencil's near-null vector matches r^(l + (n-1)/2)
        spec = dz.RadialChannelSpec(3, 1, 1.0, 60, "krein")
        pencil = dz.radial_pencil(spec)
        r = (1.0 / spec.m) * np.arange(1, spec.m + 1)
        v = r**2  # l + (n-1)/2 = 2
        resid = pencil.k_matrix().array @ v
        resid_scale = max_norm(pencil.k_matrix().array) * max_norm(v)
        assert max_norm(resid) <= 1e-12 * resid_scale

    def test_zero_mode_skipped_and_exposed(self):
        spec = dz.RadialChannelSpec(3, 0, 1.0, 400, "krein")
        with_zero = dz.radial_eigenvalues(spec, 2, include_zero_mode=True)
        without = dz.radial_eigenvalues(spec, 1)
        assert abs(with_zero[0]) <= 1e-8
        assert with_zero[1] == pytest.approx(without[0], rel=1e-12)

    def test_nonzero_eigenvalues_positive(self):
        for (n, l, bc) in ((3, 0, "krein"), (2, 1, "krein"), (4, 2, "dirichlet")):
            ev = dz.radial_eigenvalues(dz.RadialChannelSpec(n, l, 1.0, 200, bc), 4)
            assert np.all(ev > 0.0)


class TestConvergenceOrder:
    def test_radial_hard_channel_second_order(self):
        rep = dz.convergence_order(
            lambda m: dz.radial_eigenvalues(dz.RadialChannelSpec(3, 0, 1.0, m, "dirichlet"), 1)[0],
            (250, 500, 1000),
            PI**2,
        )
        assert rep.order == pytest.approx(2.0, abs=0.3)
        assert rep.richardson == pytest.approx(PI**2, rel=1e-6)

    def test_interval_soft_first_value(self):
        def run(m):
            model = dz.interval_model(dz.Grid1D(0.0, PI, m), dz.PotentialSpec.zero())
            return dz.discrete_krein_spectrum(model, 1).values()[0]

        rep = dz.convergence_order(run, (100, 200, 400), 4.0)
        assert 0.9 <= rep.order <= 2.5

    def test_non_monotone_raises(self):
        calls = {100: 1.0, 200: 1.5, 400: 1.2}
        with pytest.raises(NonMonotoneError):
            dz.convergence_order(lambda m: calls[m], (100, 200, 400), 1.0)

    def test_size_validation(self):
        with pytest.raises(ValueError):
            dz.convergence_order(lambda m: 1.0, (100, 200), 1.0)
        with pytest.raises(ValueError):
            dz.convergence_order(lambda m: 1.0, (100, 300, 600), 1.0)
