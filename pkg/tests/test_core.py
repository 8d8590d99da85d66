import numpy as np
import pytest

from ioequil import (
    ConeStatus,
    Technology,
    cone_membership,
    is_indecomposable,
    is_productive,
    leontief_solve,
    positive_solution_family,
    spectral_radius,
)
from ioequil.core import matrix_rank
from ioequil.errors import (
    DegenerateGeneratorsError,
    NotInteriorError,
    NotProductiveError,
)

from conftest import (
    indecomposable_oracle,
    random_indecomposable,
    random_productive,
    spectral_radius_oracle,
)

SYM = Technology([[0.2, 0.3], [0.3, 0.2]])


class TestTechnology:
    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            Technology([[0.1, -0.2], [0.0, 0.1]])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            Technology([[0.1, 0.2, 0.3], [0.1, 0.2, 0.3]])

    def test_rejects_unknown_units(self):
        with pytest.raises(ValueError):
            Technology([[0.1]], units="tons")

    def test_matrix_is_frozen(self):
        t = Technology([[0.1]])
        with pytest.raises(ValueError):
            t.a[0, 0] = 5.0


class TestMatrixRank:
    def test_full_rank(self):
        assert matrix_rank(np.eye(4)) == 4

    def test_dependent_columns(self):
        m = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]])
        assert matrix_rank(m) == 2

    def test_zero(self):
        assert matrix_rank(np.zeros((3, 3))) == 0


class TestIndecomposable:
    def test_all_positive(self):
        assert is_indecomposable(SYM)

    def test_block_diagonal(self):
        assert not is_indecomposable(Technology([[0.5, 0.0], [0.0, 0.5]]))

    def test_permutation_cycle(self):
        # (E + A)^1 is entrywise positive for the 2-cycle
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.all(np.eye(2) + a > 0.0)
        assert is_indecomposable(Technology(a))

    def test_singleton(self):
        assert is_indecomposable(Technology([[0.3]]))
        assert not is_indecomposable(Technology([[0.0]]))

    def test_matches_matrix_power_oracle(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            a = rng.uniform(0.0, 1.0, (n, n))
            a[rng.uniform(size=(n, n)) < 0.6] = 0.0
            assert is_indecomposable(Technology(a)) == indecomposable_oracle(a)


class TestProductive:
    def test_zero_matrix(self):
        assert is_productive(Technology(np.zeros((3, 3))))
        assert spectral_radius(np.zeros((3, 3))) == 0.0

    def test_unit_spectral_radius(self):
        assert not is_productive(Technology([[1.0]]))

    def test_derived_two_sector(self):
        t = Technology([[0.5, 0.2], [0.3, 0.4]])
        # characteristic roots (0.9 +- 0.5) / 2, largest 0.7
        assert spectral_radius_oracle(t.a) == pytest.approx(0.7, abs=1e-12)
        assert spectral_radius(t.a) == pytest.approx(0.7, abs=1e-9)
        assert is_productive(t)

    def test_agrees_with_eigenvalues_and_solve(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            a = random_indecomposable(rng, n, density=0.8)
            target = rng.choice([0.4, 0.7, 0.95, 1.05, 1.4])
            a *= target / spectral_radius_oracle(a)
            t = Technology(a)
            expected = spectral_radius_oracle(a) < 1.0
            assert is_productive(t) == expected
            if expected:
                x = np.linalg.solve(np.eye(n) - a, np.ones(n))
                assert np.all(x > 0.0)


class TestLeontief:
    def test_symmetric_example(self):
        x = leontief_solve(SYM, [0.5, 0.5])
        assert np.allclose(x, [1.0, 1.0], atol=1e-12)

    def test_zero_demand(self):
        assert np.allclose(leontief_solve(SYM, [0.0, 0.0]), 0.0)

    def test_identity_inverse(self):
        t = Technology(np.zeros((2, 2)))
        assert np.allclose(leontief_solve(t, [3.0, 7.0]), [3.0, 7.0])

    def test_not_productive_raises(self):
        with pytest.raises(NotProductiveError):
            leontief_solve(Technology([[1.0]]), [1.0])

    def test_positive_output_for_positive_demand(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            t = random_productive(rng, n, rho=float(rng.uniform(0.2, 0.9)))
            c = rng.uniform(0.1, 2.0, n)
            x = leontief_solve(t, c)
            assert np.all(x > 0.0)
            assert np.max(np.abs((np.eye(n) - t.a) @ x - c)) < 1e-9


class TestConeMembership:
    def test_standard_basis_interior(self):
        result = cone_membership([(1.0, 0.0), (0.0, 1.0)], (1.0, 1.0))
        assert result.status is ConeStatus.INTERIOR
        assert np.allclose(result.coefficients, [1.0, 1.0])

    def test_boundary(self):
        result = cone_membership([(1.0, 0.0), (0.0, 1.0)], (1.0, 0.0))
        assert result.status is ConeStatus.BOUNDARY

    def test_outside(self):
        generators = np.array([[1.0, 2.0], [2.0, 1.0]])
        # direct 2x2 solve gives coefficients (1/3, -2/3): one negative
        coeffs = np.linalg.solve(generators, [-1.0, 0.0])
        assert coeffs[1] < 0
        result = cone_membership(generators, (-1.0, 0.0))
        assert result.status is ConeStatus.OUTSIDE
        assert result.coefficients is None

    def test_outside_span(self):
        result = cone_membership([(1.0, 0.0, 0.0)], (1.0, 0.0, 0.5))
        assert result.status is ConeStatus.OUTSIDE

    def test_degenerate_generators(self):
        with pytest.raises(DegenerateGeneratorsError):
            cone_membership([(1.0, 2.0), (2.0, 4.0)], (1.0, 1.0))

    def test_interior_reconstruction(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(1, n + 1))
            g = rng.uniform(0.1, 1.0, (n, m))
            weights = rng.uniform(0.2, 2.0, m)
            b = g @ weights
            result = cone_membership(g, b)
            assert result.status is ConeStatus.INTERIOR
            assert np.max(np.abs(g @ result.coefficients - b)) < 1e-9


class TestSolutionFamily:
    def test_worked_example(self):
        c = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        family = positive_solution_family(c, (2.0, 2.0))
        assert family.rank == 2
        assert family.subset == (0, 1)
        assert family.free_columns == (2,)
        assert np.allclose(family.basis[0], [2.0, 2.0, 0.0])
        assert np.allclose(family.basis[1], [0.0, 0.0, 2.0])
        # admissibility constraint reads 2 * gamma_free < 2 on both rows
        assert np.allclose(family.constraint_matrix, [[2.0], [2.0]])
        assert np.allclose(family.constraint_rhs, [2.0, 2.0])

    def test_worked_example_midpoint(self):
        c = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        family = positive_solution_family(c, (2.0, 2.0))
        y = family.combine([0.5, 0.5])
        assert np.allclose(y, [1.0, 1.0, 1.0])
        assert np.allclose(c @ y, [2.0, 2.0])

    def test_point_family_for_identity(self):
        psi = np.array([0.7, 1.3, 0.2])
        family = positive_solution_family(np.eye(3), psi)
        assert family.rank == 3
        assert family.size == 1
        assert np.allclose(family.basis[0], psi)
        assert np.allclose(family.combine([1.0]), psi)

    def test_not_interior(self):
        with pytest.raises(NotInteriorError):
            positive_solution_family(np.eye(2), (1.0, 0.0))

    def test_random_instances(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 7))
            l = int(rng.integers(1, 9))
            c = rng.uniform(0.0, 1.0, (n, l))
            c[rng.uniform(size=(n, l)) < 0.2] = 0.0
            c[0, :] += 0.05  # no zero columns
            psi = c @ rng.uniform(0.2, 2.0, l)
            try:
                family = positive_solution_family(c, psi)
            except NotInteriorError:
                continue
            for _ in range(10):
                gamma = family.sample_gamma(rng)
                assert family.is_admissible(gamma)
                y = family.combine(gamma)
                assert np.all(y > 0.0)
                assert np.max(np.abs(c @ y - psi)) < 1e-9
