"""Verification reports and the delimited formats they serialize to.

Every named check produces one VerificationReport: a map of named residuals,
the governing tolerance, and the grid it certified on.  The JSON layout
{check, anchor, residuals, tolerance, passed, grid_M, wall_ms} and the sweep
CSV header are external contracts pinned by tests; wall_ms is the only field
allowed to differ between identical runs.

Tolerances live here, in one table, so the check implementations, the suite
runner, and the acceptance tests cannot drift apart.  A table entry is either
a single number applied to every residual of the check, or a per-residual map
in which None marks a value that is reported but not gated and "*" supplies
the default for names not listed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

# Residuals are relative unless a check documents otherwise.  Band-style
# entries (theorem1, theorem3a) gate a dimensionless ratio rather than an
# error, hence the large values.
TOLERANCES = {
    "basis_orthonormality": 1e-10,
    "structure": {"triangularity": 1e-10, "diagonal": 1e-10,
                  "offdiag_entry": 1e-8, "berezin": 1e-8},
    "lemma1": {"*": 1e-8, "symbol_membership": None},
    "lemma2": {"*": 1e-8, "nu_analyticity": None},
    "lemma3": {"expansion": 1e-8, "s1_excess": 1e-10,
               "s1_norm": None, "s1_bound": None},
    "theorem1_besov": {"ratio_band": 100.0, "ratio_max": None,
                       "ratio_min": None},
    "theorem3a": {"ratio_band": 50.0, "ratio_spread": 10.0},
    "theorem3b": {"kernel_eigenrelation": 1e-8, "dual_eigenrelation": 1e-7},
    "theorem4": {"identity": 1e-8, "gram_deviation_s2": None},
    "theorem7a_shift_powers": 1e-10,
    "theorem8": {"*": 1e-6, "hand_case": 1e-10},
    "theorem9": 1e-8,
    "remark4_dirichlet": {"oracle_value": 1e-8, "hankel_frobenius": 1e-6},
    "remark5_cancellation": {"gap_shortfall": 0.0, "cancellation_gap": None},
    "crofoot": 1e-6,
    "nest_projection_identity": 0.0,
}

# Anchor strings cite the numbered identity table in README.md.
ANCHORS = {
    "basis_orthonormality":
        "identity (1): Gram(e_1..e_N) = I for the Takenaka-Malmquist family",
    "structure":
        "identity (2): analytic A_phi lower triangular, diagonal phi(z_n), "
        "Berezin values phi(z_n) + conj(psi(z_n))",
    "lemma1":
        "identity (3): A_phi = U (H_{conj(C phi)} + R) with "
        "R f = <f, C phi> 1 and U = M_{u conj(z)}",
    "lemma2":
        "identity (4): A_{conj(psi)} = U (B_{conj(nu u)} + V) with "
        "nu = psi / z",
    "lemma3":
        "identity (5): A_phi = sum_i phi(z_i) A_{alpha_i} and "
        "||A_phi||_S1 <= sum_i |phi(z_i)| / delta_i",
    "theorem1_besov":
        "identity (6): ||A_phi||_S2 comparable to the Besov B_2 norm "
        "of C phi",
    "theorem3a":
        "identity (7): A_phi in S_p iff {phi(z_i)} in l^p, rendered as a "
        "bounded ratio band",
    "theorem3b":
        "identity (8): A_{conj(phi)} khat_j = conj(phi(z_j)) khat_j and "
        "A_phi h_n = phi(z_n) h_n",
    "theorem4":
        "identity (9): [<A khat_i, khat_j>] = D_phi G + G D_conj(psi) "
        "entrywise",
    "theorem7a_shift_powers":
        "identity (10): (A_z)^k = A_{z^k}",
    "theorem8":
        "identity (11): ||B_{conj(f)}||_S2^2 = <f, Tf> for f in K_{u^2}",
    "theorem9":
        "identity (12): Tf(w) = (zf)'(w) - 2 u(w) (z f_2)'(w)",
    "remark4_dirichlet":
        "identity (13): classical Hankel of conj(f) has squared S_2 norm "
        "sum_n (n+1) |fhat(n)|^2",
    "remark5_cancellation":
        "identity (14): node cancellation leaves ||A_{phi+conj(psi)}||_Sp "
        "far below the part norms",
    "crofoot":
        "identity (15): J_a = sqrt(1-|a|^2)/(1 - conj(a) u) maps K_u "
        "unitarily onto K_{u_a} and conjugates A^{u_a}_phi to "
        "A^u_{phi/(1 - a conj(u))}",
    "nest_projection_identity":
        "identity (16): R_N = T_N + D_N for finite-nest triangular "
        "truncation",
}

SWEEP_HEADER = ("N", "p", "schatten_norm", "node_lp_norm", "ratio",
                "min_delta", "grid_M")

# Non-finite residuals always fail the gate; they are clamped to this
# sentinel on serialization so the emitted JSON stays strictly valid.
_JSON_CLAMP = 1e308


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one named check.

    passed holds exactly when every gated residual is finite and at most its
    tolerance; the tolerance field records the loosest gate for display.
    grid_M is the certifying boundary grid, 0 meaning a closed-form route
    that used no grid.
    """

    check: str
    anchor: str
    residuals: dict
    tolerance: float
    passed: bool
    grid_M: int
    wall_ms: float

    def to_dict(self) -> dict:
        return {"check": self.check,
                "anchor": self.anchor,
                "residuals": {k: _json_real(v)
                              for k, v in self.residuals.items()},
                "tolerance": float(self.tolerance),
                "passed": bool(self.passed),
                "grid_M": int(self.grid_M),
                "wall_ms": float(self.wall_ms)}

    def to_json(self, compact: bool = False) -> str:
        d = self.to_dict()
        if compact:
            return json.dumps(d, sort_keys=True, separators=(",", ":"))
        return json.dumps(d, sort_keys=True, indent=2)


def _json_real(v: float) -> float:
    v = float(v)
    if math.isfinite(v):
        return v
    return _JSON_CLAMP if v > 0 else -_JSON_CLAMP


def _gate_for(check: str, name: str, table) -> float | None:
    if not isinstance(table, dict):
        return float(table)
    if name in table:
        gate = table[name]
        return None if gate is None else float(gate)
    if "*" in table:
        return float(table["*"])
    raise ValueError(f"no tolerance for residual {name!r} of check {check!r}")


def make_report(check: str, residuals: dict, grid_m: int,
                wall_ms: float = 0.0, anchor: str | None = None,
                tolerances=None) -> VerificationReport:
    """Build a report, resolving gates from the tolerance table.

    Informational residuals (gate None) do not decide passed but still fail
    the report when non-finite, since that always signals a numerical
    breakdown upstream.
    """
    if anchor is None:
        anchor = ANCHORS.get(check, "")
    if tolerances is None:
        if check not in TOLERANCES:
            raise ValueError(f"unknown check {check!r} and no explicit tolerances")
        tolerances = TOLERANCES[check]

    clean = {k: float(v) for k, v in residuals.items()}
    passed = True
    gates = []
    for name, value in clean.items():
        gate = _gate_for(check, name, tolerances)
        if not math.isfinite(value):
            passed = False
        elif gate is not None and value > gate:
            passed = False
        if gate is not None:
            gates.append(gate)
    if not gates:
        raise ValueError(f"check {check!r} has no gated residuals")
    return VerificationReport(check, anchor, clean, max(gates), passed,
                              int(grid_m), float(wall_ms))


def write_report(report: VerificationReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")


def write_report_lines(reports, path) -> None:
    """One compact JSON object per line, suite order preserved."""
    with open(path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(report.to_json(compact=True) + "\n")


def reports_match(a: VerificationReport, b: VerificationReport) -> bool:
    """Equality modulo wall_ms, the determinism contract for repeated runs."""
    da, db = a.to_dict(), b.to_dict()
    da.pop("wall_ms")
    db.pop("wall_ms")
    return da == db


def _cell(value) -> str:
    if isinstance(value, bool):
        raise TypeError("boolean has no place in a sweep row")
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def format_sweep_rows(rows) -> str:
    """CSV text for (N, p, schatten, node_lp, ratio, min_delta, grid_M) rows.

    repr-format floats and a bare \n terminator keep the bytes identical
    across runs and platforms; infinity prints as inf in the p column.
    """
    lines = [",".join(SWEEP_HEADER)]
    for row in rows:
        cells = tuple(row)
        if len(cells) != len(SWEEP_HEADER):
            raise ValueError(f"sweep row has {len(cells)} cells, "
                             f"expected {len(SWEEP_HEADER)}")
        lines.append(",".join(_cell(c) for c in cells))
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_sweep_rows(rows))
