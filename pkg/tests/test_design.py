import numpy as np
import pytest

from iongeom.coupling import (
    CouplingMatrix,
    effective_coupling,
    fidelity,
    layer_coupling_matrix,
)
from iongeom.design import (
    DesignProblem,
    InfeasibleDesignError,
    UnrealizableWeightError,
    design_report,
    design_schedule,
    mode_patterns,
    rank_one_coupling,
    realized_weights,
    solve_weights,
    weights_to_schedule,
)
from iongeom.targets import TargetGraph, cross_polytope, leaves_only_tree

def problem_for(chain, target, modes):
    _, _, spec, eta = chain
    return DesignProblem(target=target, spectrum=spec, eta=eta, allowed_modes=modes)


def complete_graph(n):
    return TargetGraph(
        name="complete",
        coupling=CouplingMatrix(
            values=np.ones((n, n)) - np.eye(n), normalized=True
        ),
    )


class TestSolveWeights:
    def test_all_to_all_single_mode(self, chain4):
        prob = problem_for(chain4, complete_graph(4), (1,))
        ws = solve_weights(prob)
        assert ws.weights[0] > 0
        approx = rank_one_coupling(prob.spectrum, ws)
        assert fidelity(approx, prob.target.coupling).fidelity > 0.995

    def test_cross_polytope_matches_brute_force_scan(self, chain4):
        # independent oracle: dense 2-parameter scan of the residual
        prob = problem_for(chain4, cross_polytope(4), (1, 3))
        ws = solve_weights(prob)
        patterns = mode_patterns(prob.spectrum, (1, 3))
        iu = np.triu_indices(4, k=1)
        y = prob.target.coupling.values[iu]
        y = y / np.linalg.norm(y)
        grid = np.linspace(-2.0, 2.0, 161)
        best = None
        for w1 in grid:
            for w3 in grid:
                r = np.linalg.norm(w1 * patterns[0][iu] + w3 * patterns[1][iu] - y)
                if best is None or r < best[0]:
                    best = (r, w1, w3)
        assert ws.residual_norm <= best[0] + 1e-9
        assert ws.weights[0] == pytest.approx(best[1], abs=0.05)
        assert ws.weights[1] == pytest.approx(best[2], abs=0.05)
        # mode-3 weight signed to cancel the (1,4) and (2,3) pairs
        approx = rank_one_coupling(prob.spectrum, ws).max_normalized().values
        assert abs(approx[0, 3]) < 1e-2
        assert abs(approx[1, 2]) < 1e-2

    def test_pattern_self_consistency(self, chain4):
        _, _, spec, eta = chain4
        p3 = mode_patterns(spec, (3,))[0]
        target = TargetGraph(
            name="p3", coupling=CouplingMatrix(values=p3).max_normalized()
        )
        prob = DesignProblem(target=target, spectrum=spec, eta=eta, allowed_modes=(3,))
        ws = solve_weights(prob)
        assert ws.residual_norm < 1e-10

    def test_invariant_under_target_rescaling(self, chain6):
        _, _, spec, eta = chain6
        base = cross_polytope(6)
        scaled = TargetGraph(
            name="scaled",
            coupling=CouplingMatrix(values=37.5 * base.coupling.values),
        )
        w1 = solve_weights(
            DesignProblem(target=base, spectrum=spec, eta=eta, allowed_modes=(1, 3, 5))
        )
        w2 = solve_weights(
            DesignProblem(target=scaled, spectrum=spec, eta=eta, allowed_modes=(1, 3, 5))
        )
        assert np.allclose(w1.weights, w2.weights)

    def test_antisymmetric_modes_get_zero_weight(self, chain6):
        # inversion-symmetric target: odd-parity (even-index) modes unused
        prob = problem_for(chain6, cross_polytope(6), tuple(range(1, 7)))
        ws = solve_weights(prob)
        assert np.max(np.abs(ws.weights[[1, 3, 5]])) < 1e-8

    def test_multi_mode_at_least_as_good_as_single(self, chain6):
        target = leaves_only_tree(6, -2.0)
        multi = solve_weights(problem_for(chain6, target, tuple(range(1, 7))))
        multi_fid = fidelity(
            rank_one_coupling(chain6[2], multi), target.coupling
        ).fidelity
        for mode in range(1, 7):
            single = solve_weights(problem_for(chain6, target, (mode,)))
            single_fid = fidelity(
                rank_one_coupling(chain6[2], single), target.coupling
            ).fidelity
            assert multi_fid >= single_fid - 1e-12

    def test_rank_deficiency_reported(self, chain4):
        # duplicate mode columns force a rank gap and a minimum-norm answer
        _, _, spec, eta = chain4
        prob = DesignProblem(
            target=cross_polytope(4), spectrum=spec, eta=eta, allowed_modes=(1, 1, 3)
        )
        ws = solve_weights(prob)
        assert ws.nullspace_dim == 1
        assert ws.weights[0] == pytest.approx(ws.weights[1], abs=1e-10)


class TestWeightsToSchedule:
    def test_table_durations_from_explicit_detunings(self, chain4):
        _, _, spec, eta = chain4
        prob = problem_for(chain4, cross_polytope(4), (1, 3))
        ws = solve_weights(prob)
        sched = weights_to_schedule(
            ws,
            spec,
            base_detuning=100e3,
            detunings={1: 107.6e3, 3: -71.14e3},
        )
        by_mode = {l.mode_index: l for l in sched.layers}
        assert by_mode[1].detuning == pytest.approx(107.6e3)
        assert by_mode[3].detuning == pytest.approx(-71.14e3)
        assert by_mode[1].duration == pytest.approx(9.29e-6, abs=0.01e-6)
        assert by_mode[3].duration == pytest.approx(14.06e-6, abs=0.01e-6)

    def test_single_weight_loop_closing_duration(self, chain8):
        _, _, spec, eta = chain8
        target = TargetGraph(
            name="p3",
            coupling=CouplingMatrix(values=mode_patterns(spec, (3,))[0]).max_normalized(),
        )
        ws = solve_weights(
            DesignProblem(target=target, spectrum=spec, eta=eta, allowed_modes=(3,))
        )
        sched = weights_to_schedule(ws, spec, base_detuning=100e3)
        assert len(sched.layers) == 1
        assert sched.layers[0].duration == pytest.approx(10.0e-6, rel=1e-9)

    def test_zero_weight_emits_no_layer(self, chain6):
        prob = problem_for(chain6, cross_polytope(6), tuple(range(1, 7)))
        ws = solve_weights(prob)
        sched = weights_to_schedule(ws, chain6[2], base_detuning=80e3)
        assert sorted(l.mode_index for l in sched.layers) == [1, 3, 5]

    def test_detuning_signs_follow_weights(self, chain6):
        prob = problem_for(chain6, cross_polytope(6), (1, 3, 5))
        ws = solve_weights(prob)
        sched = weights_to_schedule(ws, chain6[2], base_detuning=80e3)
        signs = {l.mode_index: np.sign(l.detuning) for l in sched.layers}
        for mode, w in zip(ws.modes, ws.weights):
            assert signs[mode] == np.sign(w)

    def test_addressed_mode_closure_exact(self, chain6):
        from iongeom.coupling import loop_closure_report

        prob = problem_for(chain6, cross_polytope(6), (1, 3, 5))
        ws = solve_weights(prob)
        sched = weights_to_schedule(ws, chain6[2], base_detuning=80e3)
        report = loop_closure_report(sched, chain6[2])
        for entry in report.layers:
            assert entry.deviations[entry.mode_index - 1] < 1e-9

    def test_realized_weights_match_request(self, chain6):
        prob = problem_for(chain6, cross_polytope(6), (1, 3, 5))
        ws = solve_weights(prob)
        sched = weights_to_schedule(ws, chain6[2], base_detuning=80e3)
        realized = realized_weights(sched, chain6[2])
        requested = {
            m: w / np.abs(ws.weights).max() for m, w in zip(ws.modes, ws.weights)
        }
        for mode, value in realized.items():
            assert value == pytest.approx(requested[mode], rel=1e-9)

    def test_unrealizable_weight_reports_k_max(self, chain6):
        # a 100:1 weight ratio cannot fit a narrow band at k_max = 1
        _, _, spec, eta = chain6
        values = np.zeros((6, 6))
        p1, p3 = mode_patterns(spec, (1, 3))
        values = p1 + 0.001 * p3
        target = TargetGraph(
            name="skewed", coupling=CouplingMatrix(values=values).max_normalized()
        )
        ws = solve_weights(
            DesignProblem(target=target, spectrum=spec, eta=eta, allowed_modes=(1, 3))
        )
        with pytest.raises(UnrealizableWeightError) as err:
            weights_to_schedule(
                ws, spec, base_detuning=100e3, k_max=1, band=(50e3, 150e3),
                prune_fraction=1e-6,
            )
        assert err.value.suggested_k_max is not None


class TestDesignSchedule:
    def test_four_ion_cross_polytope(self, chain4):
        prob = problem_for(chain4, cross_polytope(4), (1, 3))
        sol = design_schedule(prob)
        assert len(sol.schedule.layers) == 2
        assert sol.achieved_fidelity >= 0.995
        assert sol.rank_one_fidelity >= 0.999
        # recomputed, not cached: fidelity of the schedule's effective
        # coupling equals the reported number
        mats = [
            layer_coupling_matrix(l, prob.spectrum, prob.eta)
            for l in sol.schedule.layers
        ]
        jbar = effective_coupling(sol.schedule, mats)
        assert fidelity(jbar, prob.target.coupling).fidelity == pytest.approx(
            sol.achieved_fidelity, abs=1e-12
        )

    def test_six_ion_three_layers(self, chain6):
        prob = problem_for(chain6, cross_polytope(6), (1, 3, 5))
        sol = design_schedule(prob)
        assert sorted(l.mode_index for l in sol.schedule.layers) == [1, 3, 5]

    def test_eight_ion_four_layers(self, chain8):
        prob = problem_for(chain8, cross_polytope(8), (1, 3, 5, 7))
        sol = design_schedule(prob)
        assert sorted(l.mode_index for l in sol.schedule.layers) == [1, 3, 5, 7]

    def test_report_shape(self, chain4):
        prob = problem_for(chain4, cross_polytope(4), (1, 3))
        sol = design_schedule(prob)
        text, report = design_report(prob, sol)
        table_rows = [l for l in text.splitlines() if l.strip().startswith(("1", "3"))]
        assert len(table_rows) == 2
        assert report["achieved_fidelity"] == sol.achieved_fidelity
        assert len(report["schedule"]["layers"]) == 2
        assert report["closure"]["tolerance"] == pytest.approx(0.05)
        from iongeom.coupling import Schedule

        again = Schedule.from_json_dict(report["schedule"])
        assert again == sol.schedule

    def test_infeasible_when_grid_too_low(self, chain6):
        _, _, spec, eta = chain6
        prob = DesignProblem(
            target=cross_polytope(6),
            spectrum=spec,
            eta=eta,
            allowed_modes=(1, 3, 5),
            detuning_grid=np.array([1.0]),  # 1 Hz base detuning
        )
        with pytest.raises(InfeasibleDesignError):
            design_schedule(prob, k_max=1)

    def test_empty_modes_rejected(self, chain4):
        _, _, spec, eta = chain4
        with pytest.raises(ValueError):
            DesignProblem(
                target=cross_polytope(4), spectrum=spec, eta=eta, allowed_modes=()
            )
