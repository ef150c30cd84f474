"""One check per acceptance criterion; each records a [PASS]/[FAIL] line.

Run directly (``python3 tests/test_acceptance.py``) or as part of pytest,
where the lines are repeated in an "acceptance criteria" summary section.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

if __name__ == "__main__":
    # pytest imports this file again as a test module
    sys.exit(pytest.main([__file__, "-q"]))

sys.path.insert(0, str(Path(__file__).parent))

import conftest  # noqa: E402
import oracles  # noqa: E402
from blochgeo import cli, numerics  # noqa: E402
from blochgeo.complexity import (  # noqa: E402
    LINEAR_COMPLEXITY,
    QUADRATIC_COMPLEXITY,
    accessed_volume,
    accessible_volume,
    complexity,
    complexity_closed_form,
    complexity_limit,
    volume_closed_forms,
)
from blochgeo.curvature import CurvatureRoute, curvature_at, curvature_samples  # noqa: E402
from blochgeo.efficiency import (  # noqa: E402
    efficiency_report,
    fubini_study_rate_check,
    geodesic_efficiency,
    path_length,
)
from blochgeo.model import (  # noqa: E402
    PhaseKind,
    ScenarioParams,
    bloch_at,
    field_at,
    field_derivative_at,
    hamiltonian_at,
)
from blochgeo.report import read_csv  # noqa: E402

GOLDEN = Path(__file__).parent / "golden" / "table1_reference.csv"
ORDER = [PhaseKind.NO_GROWTH, PhaseKind.LINEAR, PhaseKind.QUADRATIC, PhaseKind.EXP_GROWTH, PhaseKind.EXP_DECAY]


def unit(kind, omega0=1.0, nu0=1.0):
    return ScenarioParams(omega0, nu0, kind)


def record(number, title, failures):
    status = "PASS" if not failures else "FAIL"
    line = f"[{status}] criterion {number}: {title}"
    if failures:
        line += " | " + "; ".join(failures[:5])
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failures, line


def check(failures, ok, message):
    if not ok:
        failures.append(message)


def test_criterion_1_path_lengths():
    expected = {PhaseKind.LINEAR: 3.33, PhaseKind.QUADRATIC: 3.27, PhaseKind.EXP_GROWTH: 4.04, PhaseKind.EXP_DECAY: 3.19}
    failures = []
    for kind, want in expected.items():
        got = path_length(unit(kind))
        check(failures, abs(got - want) <= 0.01, f"{kind.value}: s={got:.5f}, want {want}+-0.01")
    got = path_length(unit(PhaseKind.NO_GROWTH))
    check(failures, abs(got - math.pi) <= 1e-10, f"no-growth: s-pi={got - math.pi:.2e}")
    record(1, "path lengths at omega0 = nu0 = 1", failures)


def test_criterion_2_efficiencies():
    expected = [1.0, 0.94, 0.96, 0.78, 0.98]
    failures = []
    for kind, want in zip(ORDER, expected):
        params = unit(kind)
        got = geodesic_efficiency(params)
        check(failures, abs(got - want) <= 0.01, f"{kind.value}: eta_ge={got:.5f}, want {want}+-0.01")
        worst = max(abs(e - 1.0) for _, e in efficiency_report(params, samples=1001).eta_se_samples)
        check(failures, worst <= 1e-12, f"{kind.value}: max|eta_se-1|={worst:.2e}")
    record(2, "geodesic efficiencies and unit speed efficiency", failures)


def test_criterion_3_complexities():
    expected = [0.5, 0.65, 0.73, 0.71, 0.59]
    failures = []
    for kind, want in zip(ORDER, expected):
        got = complexity(unit(kind)).complexity
        check(failures, abs(got - want) <= 0.01, f"{kind.value}: C={got:.5f}, want {want}+-0.01")
    exact = {
        PhaseKind.LINEAR: (3 * math.pi**2 - 4) / (4 * math.pi**2),
        PhaseKind.QUADRATIC: (5 * math.pi**2 - 6) / (6 * math.pi**2),
    }
    for kind, value in exact.items():
        for w in oracles.GRID:
            for nu in oracles.GRID:
                params = unit(kind, w, nu)
                closed = complexity_closed_form(params)
                check(failures, abs(closed - value) <= 1e-12, f"{kind.value}: closed form off by {closed - value:.2e}")
                got = complexity(params).complexity
                check(failures, abs(got - value) <= 1e-8,
                      f"{kind.value} ({w},{nu}): pipeline off by {got - value:.2e}")
    record(3, "complexities and exact constant values", failures)


def test_criterion_4_curvature_routes():
    failures = []
    for kind in ORDER[1:]:
        params = unit(kind)
        times = np.linspace(0.0, params.t_final, 103)[1:-1]
        for t in times:
            ortho = curvature_at(params, t, CurvatureRoute.VECTOR_ORTHOGONAL)
            kernel = curvature_at(params, t, CurvatureRoute.SCENARIO_KERNEL)
            operator = curvature_at(params, t, CurvatureRoute.OPERATOR_FORM)
            scale = max(abs(ortho), 1.0)
            check(failures, abs(ortho - kernel) / scale <= 1e-10,
                  f"{kind.value} t={t:.4f}: orthogonal vs kernel {abs(ortho - kernel) / scale:.2e}")
            check(failures, abs(operator - ortho) / scale <= 1e-6,
                  f"{kind.value} t={t:.4f}: operator vs orthogonal {abs(operator - ortho) / scale:.2e}")
    flat = unit(PhaseKind.NO_GROWTH)
    worst = max(abs(s.kappa2) for s in curvature_samples(flat, flat.times(1001)))
    check(failures, worst <= 1e-10, f"no-growth: max kappa2={worst:.2e}")
    record(4, "curvature routes agree", failures)


def test_criterion_5_short_time_limits():
    failures = []
    t = 1e-6
    for w, nu in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)]:
        target = 4 * (nu / w) ** 2
        for kind in ORDER[1:]:
            params = unit(kind, w, nu)
            for route in (CurvatureRoute.VECTOR_ORTHOGONAL, CurvatureRoute.SCENARIO_KERNEL):
                got = curvature_at(params, t, route)
                if kind is PhaseKind.QUADRATIC:
                    check(failures, abs(got) <= 1e-8, f"quadratic ({w},{nu}) {route.value}: {got:.2e}")
                else:
                    rel = abs(got - target) / target
                    check(failures, rel <= 1e-4, f"{kind.value} ({w},{nu}) {route.value}: rel {rel:.2e}")
    record(5, "short-time curvature limits", failures)


def test_criterion_6_asymptotic_complexity():
    failures = []
    growth = complexity_limit(PhaseKind.EXP_GROWTH, 1000.0)
    decay = complexity_limit(PhaseKind.EXP_DECAY, 1000.0)
    check(failures, 0.998 <= growth <= 1.0, f"growth at xi=1000: {growth!r}")
    check(failures, abs(decay - 0.5) <= 1e-3, f"decay at xi=1000: {decay!r}")
    for kind in (PhaseKind.EXP_GROWTH, PhaseKind.EXP_DECAY):
        small = complexity_limit(kind, 1e-3)
        check(failures, abs(small - LINEAR_COMPLEXITY) <= 5e-3, f"{kind.value} at xi=1e-3: {small!r}")
    record(6, "complexity limits at large and small xi", failures)


def test_criterion_7_model_invariants():
    failures = []
    fd = numerics.FiniteDiffSpec(step_scale=1e-3, order="fourth")
    for kind in ORDER:
        params = unit(kind)
        times = params.times(1001)
        bounds = (0.0, params.t_final)
        worst = dict.fromkeys(["norm", "a.h", "a.hdot", "adot", "herm", "trace", "transport", "fs"], 0.0)
        for t in times:
            a = np.asarray(bloch_at(params, t))
            h = np.asarray(field_at(params, t))
            hdot = np.asarray(field_derivative_at(params, t))
            adot = numerics.vector_derivative(lambda s: bloch_at(params, s), t, fd,
                                              scale=params.time_scale, bounds=bounds)
            ham = hamiltonian_at(params, t)
            dt = 1e-6
            worst["norm"] = max(worst["norm"], abs(np.linalg.norm(a) - 1.0))
            worst["a.h"] = max(worst["a.h"], abs(a @ h))
            worst["a.hdot"] = max(worst["a.hdot"], abs(a @ hdot))
            worst["adot"] = max(worst["adot"], np.linalg.norm(adot - 2 * np.cross(h, a)) / params.omega0)
            worst["herm"] = max(worst["herm"], np.abs(ham - ham.conj().T).max())
            worst["trace"] = max(worst["trace"], abs(np.trace(ham)))
            worst["fs"] = max(worst["fs"], fubini_study_rate_check(params, min(t, params.t_final - dt), dt))
        m, mdot = oracles.transported_with_derivative(params, times)
        worst["transport"] = float(np.abs(np.einsum("ij,ij->i", m.conj(), mdot)).max())
        limits = {"norm": 1e-12, "a.h": 1e-12, "a.hdot": 1e-10, "adot": 1e-6,
                  "herm": 1e-12, "trace": 1e-12, "transport": 1e-6, "fs": 1e-5}
        for key, limit in limits.items():
            check(failures, worst[key] <= limit, f"{kind.value} {key}: {worst[key]:.2e} > {limit:.0e}")
    record(7, "model invariants on 1001 samples", failures)


def test_criterion_8_oracle_closure():
    failures = []
    fd = numerics.FiniteDiffSpec(step_scale=1e-3, order="fourth")
    for kind in ORDER:
        for w in oracles.GRID:
            for nu in oracles.GRID:
                params = unit(kind, w, nu)
                bounds = (0.0, params.t_final)
                for t in params.times(41):
                    numeric = numerics.vector_derivative(lambda s: field_at(params, s), t, fd,
                                                         scale=oracles.local_time_scale(params, t),
                                                         bounds=bounds)
                    exact = np.asarray(field_derivative_at(params, t))
                    gap = np.abs(numeric - exact).max() / max(1.0, np.abs(exact).max())
                    check(failures, gap <= 1e-6, f"{kind.value} ({w},{nu}) t={t:.3f}: hdot gap {gap:.2e}")
                v_bar, v_max = volume_closed_forms(params)
                got_bar = accessed_volume(params, route="angles")
                got_max = accessible_volume(params, route="angles")
                check(failures, abs(got_bar - v_bar) <= 1e-8 * abs(v_bar),
                      f"{kind.value} ({w},{nu}): V_bar rel {abs(got_bar - v_bar) / v_bar:.2e}")
                check(failures, abs(got_max - v_max) <= 1e-8 * abs(v_max),
                      f"{kind.value} ({w},{nu}): V_max rel {abs(got_max - v_max) / v_max:.2e}")
    record(8, "analytic field derivative and volumes against independent routes", failures)


def test_criterion_9_cli_determinism(tmp_path, capsys):
    failures = []
    outputs = []
    for name in ("first.csv", "second.csv"):
        path = tmp_path / name
        code = cli.main(["run", "--scenario", "exp-growth", "--samples", "1001", "--out", str(path)])
        check(failures, code == 0, f"run exited with {code}")
        outputs.append(path.read_bytes() if path.exists() else b"")
    check(failures, outputs[0] == outputs[1] and outputs[0], "run outputs differ")

    capsys.readouterr()
    code = cli.main(["table1"])
    got = read_csv(capsys.readouterr().out)
    want = read_csv(GOLDEN.read_text())
    check(failures, code == 0, f"table1 exited with {code}")
    check(failures, got.names == want.names, f"table1 columns {got.names}")
    check(failures, got.columns.get("scenario") == want.columns["scenario"], "table1 row order")
    for name in ("eta_ge", "complexity"):
        for label, ours, theirs in zip(want.columns["scenario"], got.columns.get(name, []), want.columns[name]):
            check(failures, abs(ours - theirs) <= 0.01, f"table1 {label} {name}: {ours} vs {theirs}")
    for name in ("eta_se_is_one", "kappa2", "complexity_dependence"):
        check(failures, got.columns.get(name) == want.columns[name], f"table1 {name}: {got.columns.get(name)}")
    record(9, "CLI output is deterministic and table1 matches the golden file", failures)
