"""Acceptance gate: one test per shipped criterion, tolerances pinned here.

Each test prints a single PASS/FAIL line (visible under pytest -s) and then
asserts, so the criterion verdicts read as a checklist.  The suite registry
is exercised once at module scope; the determinism criterion runs it a
second time and compares.  Scale is deliberately deskbound: N <= 24 zeros
and the whole module well under a minute.
"""

import math

import numpy as np
import pytest

from modelspace_lab.blaschke import BlaschkeSpec, radial_exponential
from modelspace_lab.boundary import BoundaryFunction
from modelspace_lab.hs_theory import hs_norm_via_T, split_symbol
from modelspace_lab.model_space import build_basis
from modelspace_lab.operators import SymbolSpec, assemble_tho
from modelspace_lab.reporting import (SWEEP_HEADER, reports_match,
                                      write_sweep_csv)
from modelspace_lab.verify import (comparability_sweep, run_suite,
                                   theorem1_experiment)


@pytest.fixture(scope="module")
def suite():
    reports = run_suite(["all"])
    return {r.check: r for r in reports}


def _verdict(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    assert ok, line


def test_01_basis_certification(suite):
    r = suite["basis_orthonormality"]
    dev = r.residuals["gram_deviation"]
    _verdict(1, dev <= 1e-10,
             f"Gram(e) deviation {dev:.3e} <= 1e-10 for "
             f"radialExponential(0.5), N=16")


def test_02_triangularity_and_diagonal(suite):
    r = suite["structure"]
    tri = r.residuals["triangularity"]
    diag = r.residuals["diagonal"]
    entry = r.residuals["offdiag_entry"]
    ok = tri <= 1e-10 and diag <= 1e-10 and entry <= 1e-8
    _verdict(2, ok,
             f"A_z on zeros (0, 0.5, 0.8): wrong side {tri:.3e} <= 1e-10, "
             f"diagonal {diag:.3e} <= 1e-10, sqrt(0.75) entry "
             f"{entry:.3e} <= 1e-8")


def test_03_lemma_factorizations(suite):
    gated = {
        "lemma1": ("factorization", "unitarity", "extension_by_zero"),
        "lemma2": ("factorization",),
    }
    worst = max(suite[check].residuals[name]
                for check, names in gated.items() for name in names)
    _verdict(3, worst <= 1e-8,
             f"factorization residuals, N in {{1,2,4,8}}: worst "
             f"{worst:.3e} <= 1e-8")


def test_04_lemma3_expansion_and_trace_bound(suite):
    r = suite["lemma3"]
    expansion = r.residuals["expansion"]
    excess = r.residuals["s1_excess"]
    ok = expansion <= 1e-8 and excess <= 1e-10
    _verdict(4, ok,
             f"subproduct expansion {expansion:.3e} <= 1e-8, S1 bound "
             f"excess {excess:.3e} <= 1e-10 over 10 draws, N=8")


def test_05_comparability_band():
    sweep = comparability_sweep(lambda n: radial_exponential(0.5, n),
                                SymbolSpec.monomial(1),
                                (1.0, 2.0, math.inf), (2, 4, 8, 16))
    ratios = [row[4] for row in sweep.rows]
    in_band = all(1.0 / 50.0 <= r <= 50.0 for r in ratios)
    spreads = {}
    for row in sweep.rows:
        spreads.setdefault(row[1], []).append(row[4])
    spread = max(max(rs) / min(rs) for rs in spreads.values())
    ok = in_band and spread <= 10.0
    _verdict(5, ok,
             f"ratios in [{min(ratios):.3f}, {max(ratios):.3f}] within "
             f"[1/50, 50], per-p spread {spread:.3f} <= 10")


def test_06_eigenrelations(suite):
    r = suite["theorem3b"]
    kernel = r.residuals["kernel_eigenrelation"]
    dual = r.residuals["dual_eigenrelation"]
    ok = kernel <= 1e-8 and dual <= 1e-7
    _verdict(6, ok,
             f"kernel eigenrelation {kernel:.3e} <= 1e-8, dual "
             f"{dual:.3e} <= 1e-7, N=8")


def test_07_gram_identity(suite):
    r = suite["theorem4"]
    identity = r.residuals["identity"]
    reported = r.residuals["gram_deviation_s2"]
    _verdict(7, identity <= 1e-8,
             f"kernel-matrix identity {identity:.3e} <= 1e-8 on thin(0.5) "
             f"N=8; ||G - I||_S2 = {reported:.3f} reported")


def test_08_shift_powers(suite):
    r = suite["theorem7a_shift_powers"]
    worst = max(r.residuals["power_2"], r.residuals["power_3"])
    _verdict(8, worst <= 1e-10,
             f"(A_z)^k vs A_z^k residual {worst:.3e} <= 1e-10 "
             f"for k in {{2,3}}, N=8")


def test_09_hilbert_schmidt_routes(suite):
    pointwise = suite["theorem9"].residuals["pointwise_agreement"]
    relative = suite["theorem8"].residuals["relative_deviation"]

    spec = BlaschkeSpec((0.0, 0.0))
    basis = build_basis(spec)
    f = BoundaryFunction(
        SymbolSpec.laurent({0: 1.0, 1: 2.0, 2: 3.0, 3: 4.0}).sample(spec, 256))
    form = assemble_tho(SymbolSpec.from_boundary(f, "hand"), basis,
                        convention="bilinear")
    frob_sq = float(np.sum(np.abs(form.matrix) ** 2))
    pairing = hs_norm_via_T(split_symbol(f, basis), spec)
    hand_ok = abs(frob_sq - 18.0) <= 1e-10 and abs(pairing - 18.0) <= 1e-10

    ok = pointwise <= 1e-8 and relative <= 1e-6 and hand_ok
    _verdict(9, ok,
             f"T-transform pointwise {pointwise:.3e} <= 1e-8 at 20 points; "
             f"norm-route deviation {relative:.3e} <= 1e-6 for N in "
             f"{{1,2,8}}; hand instance {frob_sq:.12f} and "
             f"{pairing:.12f} equal 18 within 1e-10")


def test_10_dirichlet_oracle(suite):
    r = suite["remark4_dirichlet"]
    oracle = r.residuals["oracle_value"]
    hankel = r.residuals["hankel_frobenius"]
    ok = oracle <= 1e-8 and hankel <= 1e-6
    _verdict(10, ok,
             f"Dirichlet value vs 16/9 residual {oracle:.3e} <= 1e-8, "
             f"64-truncated Hankel cross-check {hankel:.3e} <= 1e-6")


def test_11_crofoot(suite):
    r = suite["crofoot"]
    worst = max(r.residuals.values())
    _verdict(11, worst <= 1e-6,
             f"Crofoot unitarity/conjugation residual {worst:.3e} <= 1e-6 "
             f"for alpha in {{0, 0.3, 0.3i}}, N=4")


def test_12_nest_projections(suite):
    r = suite["nest_projection_identity"]
    decomposition = r.residuals["decomposition"]
    diagonal = r.residuals["diagonal_refinement"]
    ok = decomposition == 0.0 and diagonal == 0.0
    _verdict(12, ok,
             f"R = T + D decomposition residual {decomposition} and "
             f"full-refinement diagonal residual {diagonal}, both exact")


def test_13_besov_comparability(tmp_path):
    # only boundedness of the ratio family is asserted; sharp
    # comparability constants are out of reach at this scale
    result = theorem1_experiment(seed=None, members=6)
    ratios = [row[4] for row in result.rows]
    band = max(ratios) / min(ratios)
    trend = tmp_path / "theorem1_trend.csv"
    write_sweep_csv(result.rows, trend)
    archived = trend.exists() and \
        trend.read_text().splitlines()[0] == ",".join(SWEEP_HEADER)
    ok = band <= 100.0 and all(r > 0 for r in ratios) and archived
    _verdict(13, ok,
             f"S2/Besov ratio band {band:.3f} <= 100 over 6 kernel "
             f"combinations; trend CSV archived at {trend.name}")


def test_14_determinism(suite):
    second = {r.check: r for r in run_suite(["all"])}
    assert set(second) == set(suite)
    same = all(reports_match(suite[name], second[name]) for name in suite)
    budget = max(sum(r.wall_ms for r in batch.values())
                 for batch in (suite, second)) / 1e3
    ok = same and budget < 60.0
    _verdict(14, ok,
             f"two full runs identical modulo wall_ms; suite wall "
             f"{budget:.1f} s < 60 s")
