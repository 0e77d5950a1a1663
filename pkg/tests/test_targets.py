import numpy as np
import pytest

from iongeom.targets import (
    TargetValidationError,
    cayley_tree_c36,
    cross_polytope,
    custom_target,
    leaves_only_tree,
    triangular_torus,
)


def degrees(values):
    return (values != 0.0).sum(axis=1)


def edge_count(values):
    return int((np.triu(values, k=1) != 0.0).sum())


class TestCrossPolytope:
    def test_plaquette_zeros_at_mirror_pairs(self):
        j = cross_polytope(4).coupling.values
        assert j[0, 3] == 0.0 and j[1, 2] == 0.0
        iu = np.triu_indices(4, k=1)
        assert (j[iu] != 0).sum() == 4

    def test_octahedron_degrees_and_edges(self):
        j = cross_polytope(6).coupling.values
        assert np.all(degrees(j) == 4)
        assert edge_count(j) == 12
        for i in range(6):
            assert j[i, 5 - i] == 0.0

    def test_sixteen_cell_edges(self):
        j = cross_polytope(8).coupling.values
        assert edge_count(j) == 24
        assert sum(j[i, 7 - i] == 0.0 for i in range(8)) == 8

    @pytest.mark.parametrize("bad", [3, 5, 2, 7])
    def test_odd_or_small_rejected(self, bad):
        with pytest.raises(ValueError):
            cross_polytope(bad)

    def test_mirror_pair_permutation_invariance(self):
        # permutations preserving mirror pairs leave the graph unchanged
        j = cross_polytope(6).coupling.values
        perm = np.array([2, 1, 0, 5, 4, 3])  # swap pair (1,6) with (3,4)
        assert np.array_equal(j, j[np.ix_(perm, perm)])


class TestLeavesOnlyTree:
    def test_unit_entries_at_powers_of_two(self):
        j = leaves_only_tree(6, 0.0).coupling.values
        for i in range(6):
            for k in range(i + 1, 6):
                expected = 1.0 if (k - i) in (1, 2, 4) else 0.0
                assert j[i, k] == expected

    def test_weights_for_s_minus_two(self):
        j = leaves_only_tree(6, -2.0).coupling.values
        assert j[0, 1] == pytest.approx(1.0)
        assert j[0, 2] == pytest.approx(0.25)
        assert j[0, 4] == pytest.approx(0.0625)

    def test_distance_three_always_zero(self):
        for n in (4, 6, 9):
            j = leaves_only_tree(n, 1.3).coupling.values
            for i in range(n - 3):
                assert j[i, i + 3] == 0.0

    def test_monotone_weights_in_level(self):
        for s, direction in ((-1.5, -1), (0.8, 1)):
            j = leaves_only_tree(9, s).coupling.values
            w = [j[0, 1], j[0, 2], j[0, 4], j[0, 8]]
            diffs = np.diff(w)
            assert np.all(direction * diffs > 0)

    def test_needs_two_qubits(self):
        with pytest.raises(ValueError):
            leaves_only_tree(1, 0.0)


class TestCayleyTree:
    def test_tree_shape(self):
        j = cayley_tree_c36().coupling.values
        assert edge_count(j) == 5
        deg = degrees(j)
        assert sorted(deg) == [1, 1, 1, 1, 3, 3]
        assert deg[2] == 3 and deg[3] == 3  # centers on the middle ions
        # connected and acyclic: 5 edges on 6 vertices with full reachability
        reach = {0}
        frontier = [0]
        while frontier:
            i = frontier.pop()
            for k in np.nonzero(j[i])[0]:
                if k not in reach:
                    reach.add(int(k))
                    frontier.append(int(k))
        assert reach == set(range(6))

    def test_mirror_symmetric(self):
        j = cayley_tree_c36().coupling.values
        rev = j[::-1, ::-1]
        assert np.array_equal(j, rev)


class TestTriangularTorus:
    def test_degrees(self):
        j = triangular_torus(3, 3).coupling.values
        assert np.all(degrees(j) == 6)

    def test_edge_count(self):
        assert edge_count(triangular_torus(3, 3).coupling.values) == 27

    def test_non_neighbors_of_origin(self):
        j = triangular_torus(3, 3).coupling.values
        non = [k for k in range(1, 9) if j[0, k] == 0.0]
        # row-major: (1,2) -> 5, (2,1) -> 7
        assert non == [5, 7]

    def test_small_lattice_rejected(self):
        with pytest.raises(ValueError):
            triangular_torus(2, 3)


class TestCustomTarget:
    def test_edge_list(self, tmp_path):
        f = tmp_path / "pair.edges"
        f.write_text("1 2 1.0\n")
        graph = custom_target(f)
        assert graph.n_ions == 2
        assert graph.coupling.values[0, 1] == 1.0

    def test_matrix_csv(self, tmp_path):
        f = tmp_path / "m.csv"
        f.write_text("0,1,0.5\n1,0,1\n0.5,1,0\n")
        graph = custom_target(f)
        assert graph.coupling.values[0, 2] == pytest.approx(0.5)
        assert np.abs(graph.coupling.values).max() == pytest.approx(1.0)

    def test_zero_target_rejected(self, tmp_path):
        f = tmp_path / "z.csv"
        f.write_text("0,0\n0,0\n")
        with pytest.raises(TargetValidationError):
            custom_target(f)

    def test_asymmetric_rejected_with_location(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("0,1\n2,0\n")
        with pytest.raises(TargetValidationError, match=r"\(1,2\)"):
            custom_target(f)

    def test_nonzero_diagonal_rejected(self, tmp_path):
        f = tmp_path / "d.csv"
        f.write_text("1,1\n1,0\n")
        with pytest.raises(TargetValidationError, match="diagonal"):
            custom_target(f)

    def test_bad_edge_line_reports_lineno(self, tmp_path):
        f = tmp_path / "bad.edges"
        f.write_text("1 2 1.0\n3 4\n")
        with pytest.raises(TargetValidationError, match=":2"):
            custom_target(f)

    def test_ragged_matrix_rejected(self, tmp_path):
        f = tmp_path / "r.csv"
        f.write_text("0,1\n1,0,0\n")
        with pytest.raises(TargetValidationError):
            custom_target(f)


def test_all_generated_targets_normalized():
    graphs = [
        cross_polytope(4),
        cross_polytope(8),
        leaves_only_tree(7, -0.5),
        cayley_tree_c36(),
        triangular_torus(3, 3),
    ]
    for g in graphs:
        v = g.coupling.values
        assert np.array_equal(v, v.T)
        assert np.all(np.diag(v) == 0.0)
        assert np.abs(v).max() == pytest.approx(1.0)
