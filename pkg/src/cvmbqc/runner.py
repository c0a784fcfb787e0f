"""Config-driven command line for the simulator.

Subcommands: spectrum, cluster-check, delayed-check, gate, compose, cz,
pipeline.  Each reads the section of the same name from an INI-style config
file, runs the experiment, writes a JSON record (and CSV series) into the
output directory, prints one line per verdict, and exits 0 only if every
verdict passed (1 on a failed verdict, 2 on usage or config errors).

Every verdict carries the named constant it was judged against, and all
floating output uses 12 significant digits with '.' as the decimal
separator, so records are byte-reproducible for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import cluster as clus
from . import gates, laser, multiplex
from .quadrature import (
    VACUUM_VARIANCE,
    expr_covariance,
    omega_matrix,
    x_quad,
    y_quad,
)

EXPERIMENT_KINDS = ("spectrum", "cluster-check", "delayed-check", "gate",
                    "compose", "cz", "pipeline")

# Named verdict thresholds.  Each is documented by the inequality it encodes.
#: Inseparability of a two-node cluster: nullifier-variance sum below 1/2.
VLF_BOUND = clus.VLF_BOUND
#: Closed-form spectrum vs numeric Fourier oracle, relative.
ORACLE_REL_TOL = 1e-6
#: Gate-matrix determinant distance from 1.
GATE_DET_TOL = 1e-12
#: Engine output covariance vs conditioning oracle, absolute.
STEP_ORACLE_TOL = 1e-9
#: Two-step phase-solver residual.
PHASE_RESIDUAL_TOL = gates.PHASE_RESIDUAL_TOL
#: Symplectic-condition residual for constructed maps.
SYMPLECTIC_TOL = 1e-12
#: Pipeline outputs vs stand-alone per-lane runs, absolute.
LANE_ISOLATION_TOL = 1e-12


class ConfigError(ValueError):
    """Invalid or missing configuration; maps to exit code 2."""


def _round12(x: float) -> float:
    return float(f"{float(x):.12g}")


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


@dataclass
class Verdict:
    name: str
    passed: bool
    value: float
    threshold: float
    comparison: str  # e.g. "<", "<=", "=="
    constant: str    # name of the threshold constant

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: value {_fmt(self.value)} "
                f"{self.comparison} {_fmt(self.threshold)} ({self.constant})")


@dataclass
class ResultRecord:
    kind: str
    inputs: dict
    scalars: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    events: tuple = ()  # pipeline event log, written separately as JSON lines

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_json(self) -> str:
        def clean(obj):
            if isinstance(obj, dict):
                return {k: clean(v) for k, v in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [clean(v) for v in obj]
            if isinstance(obj, np.ndarray):
                return clean(obj.tolist())
            if isinstance(obj, (bool, np.bool_)):
                return bool(obj)
            if isinstance(obj, (np.floating, float)):
                return _round12(obj)
            if isinstance(obj, (np.integer,)):
                return int(obj)
            return obj

        payload = {
            "kind": self.kind,
            "inputs": clean(self.inputs),
            "scalars": clean(self.scalars),
            "series": clean(self.series),
            "verdicts": [
                {"name": v.name, "passed": bool(v.passed), "value": clean(v.value),
                 "threshold": clean(v.threshold), "comparison": v.comparison,
                 "constant": v.constant}
                for v in self.verdicts
            ],
            "passed": bool(self.passed),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def series_csv(self, name: str) -> str:
        def cell(v):
            if isinstance(v, (bool, np.bool_)):
                return str(int(v))
            if isinstance(v, (float, np.floating)):
                return _fmt(v)
            return str(v)

        cols = self.series[name]
        lines = [",".join(cols)]
        for row in zip(*cols.values()):
            lines.append(",".join(cell(v) for v in row))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_PI_FORM = re.compile(r"^([+-]?\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$")


def parse_angle(text: str) -> float:
    """Angles as plain floats or simple pi fractions: 'pi/2', '-3pi/4', '0.5pi'."""
    t = text.strip().lower().replace(" ", "")
    m = _PI_FORM.match(t)
    if m:
        num = m.group(1)
        factor = 1.0 if num in ("", "+") else (-1.0 if num == "-" else float(num))
        div = float(m.group(2)) if m.group(2) else 1.0
        return factor * math.pi / div
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def _parse_floats(text: str) -> list:
    return [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]


def _parse_matrix(text: str) -> np.ndarray:
    rows = [r for r in text.split(";") if r.strip()]
    return np.array([[float(tok) for tok in row.split(",")] for row in rows])


class Params:
    """Section of the config file with field-level error messages."""

    def __init__(self, kind: str, data: dict):
        self.kind = kind
        self.data = dict(data)

    def _raw(self, key, default=None, required=False):
        if key in self.data:
            return self.data[key]
        if required:
            raise ConfigError(f"[{self.kind}] missing required key {key!r}")
        return default

    def get_float(self, key, default=None, required=False):
        raw = self._raw(key, default, required)
        if raw is None or isinstance(raw, float):
            return raw
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{self.kind}] {key} = {raw!r} is not a number") from None

    def get_int(self, key, default=None, required=False):
        raw = self._raw(key, default, required)
        if raw is None or isinstance(raw, int):
            return raw
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{self.kind}] {key} = {raw!r} is not an integer") from None

    def get_bool(self, key, default=False):
        raw = self._raw(key, default)
        if isinstance(raw, bool):
            return raw
        if str(raw).strip().lower() in ("1", "true", "yes", "on"):
            return True
        if str(raw).strip().lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{self.kind}] {key} = {raw!r} is not a boolean")

    def get_floats(self, key, default=None, required=False):
        raw = self._raw(key, default, required)
        if raw is None or isinstance(raw, list):
            return raw
        try:
            return _parse_floats(raw)
        except ValueError:
            raise ConfigError(f"[{self.kind}] {key} = {raw!r} is not a number list") from None

    def get_angle(self, key, default=None, required=False):
        raw = self._raw(key, default, required)
        if raw is None or isinstance(raw, float):
            return raw
        return parse_angle(str(raw))

    def get_str(self, key, default=None, required=False):
        raw = self._raw(key, default, required)
        return raw if raw is None else str(raw)

    def keys(self):
        return self.data.keys()


@dataclass
class ExperimentConfig:
    kind: str
    params: Params
    seed: int | None
    out_dir: Path
    fmt: str


def load_params(path: str, kind: str) -> Params:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found or unreadable")
    if not parser.has_section(kind):
        raise ConfigError(f"config file {path!r} has no [{kind}] section")
    return Params(kind, dict(parser.items(kind)))


# ---------------------------------------------------------------------------
# experiment implementations
# ---------------------------------------------------------------------------

def _run_spectrum(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    kappa = p.get_float("kappa", required=True)
    if kappa <= 0:
        raise ConfigError("[spectrum] kappa must be positive")
    lo = p.get_float("omega_min", 1e-3 * kappa)
    hi = p.get_float("omega_max", 1e3 * kappa)
    points = p.get_int("points", 200)
    factor = p.get_float("excess_factor", 10.0)
    mu = p.get_float("mu", 0.0)
    n_oracle = p.get_int("oracle_points", 9)
    if not (0 < lo < hi) or points < 2:
        raise ConfigError("[spectrum] need 0 < omega_min < omega_max and points >= 2")
    if mu != 0.0:
        raise ConfigError(
            "[spectrum] the closed-form spectrum holds at mu = 0 only; for "
            "mu > 0 use cvmbqc.laser.y_spectral_variance_oracle directly")

    omegas = np.unique(np.concatenate([
        np.logspace(math.log10(lo), math.log10(hi), points), [kappa]]))
    spec = laser.QuadratureSpectrum(kappa, laser.XNoiseModel(factor))
    y = spec.y_var(omegas)
    x = spec.x_var(omegas)

    oracle_idx = np.unique(np.linspace(0, omegas.size - 1, max(2, n_oracle)).astype(int))
    oracle_rel = 0.0
    for i in oracle_idx:
        ref = laser.y_spectral_variance_oracle(float(omegas[i]), kappa, mu)
        oracle_rel = max(oracle_rel, abs(ref - y[i]) / y[i])

    at_kappa = 4.0 * float(spec.y_var(kappa))
    uncert = float(np.min(x * y))
    record = ResultRecord(
        kind="spectrum",
        inputs={"kappa": kappa, "omega_min": lo, "omega_max": hi,
                "points": points, "excess_factor": factor, "mu": mu},
        scalars={"four_y_var_at_kappa": at_kappa, "oracle_rel_error": oracle_rel},
        series={"sweep": {"omega": list(map(float, omegas)),
                          "y_var": list(map(float, y)),
                          "x_var": list(map(float, x)),
                          "four_y_var": list(map(float, 4.0 * y))}},
    )
    record.verdicts = [
        Verdict("boundary_value_at_kappa", at_kappa == 0.5, at_kappa, 0.5, "==",
                "VLF_BOUND (4*y_var at omega = kappa sits on the bound)"),
        Verdict("squeezed_below_vacuum", bool(np.all(y < VACUUM_VARIANCE)),
                float(np.max(y)), VACUUM_VARIANCE, "<", "VACUUM_VARIANCE"),
        Verdict("uncertainty_product", uncert >= 1.0 / 16.0, uncert, 1.0 / 16.0,
                ">=", "minimum uncertainty product x_var*y_var >= 1/16"),
        Verdict("oracle_agreement", oracle_rel <= ORACLE_REL_TOL, oracle_rel,
                ORACLE_REL_TOL, "<=", "ORACLE_REL_TOL"),
    ]
    return record


def _run_cluster_check(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    graph_text = p.get_str("graph", "0 1; 1 0")
    graph = clus.ClusterGraph.from_text(graph_text)
    variances = p.get_floats("y_variance", required=True)
    if graph.n_nodes < 2:
        raise ConfigError("[cluster-check] graph needs at least two nodes")

    threshold = clus.min_squeezing_threshold(graph)
    pairwise = graph.n_nodes == 2  # the inseparability sum applies to pairs
    rows = {"y_variance": [], "nullifier_sum": [], "verdict": []}
    verdicts = []
    for v in variances:
        state = clus.generate_cluster([v] * graph.n_nodes, graph)
        if pairwise:
            res = clus.vlf_two_node_check(state, (0, 1))
            nullifier_sum = res.nullifier_sum
            passed = res.entangled
            verdicts.append(Verdict(
                f"entangled[v={v:g}]", passed, nullifier_sum, VLF_BOUND,
                "<", "VLF_BOUND"))
        else:
            # larger graphs: evaluate the nullifier variances directly and
            # check the source squeezing against the edge threshold
            exprs = clus.nullifiers(graph)
            nullifier_sum = float(np.trace(expr_covariance(exprs, state.cov)))
            passed = v < threshold
            verdicts.append(Verdict(
                f"below_edge_threshold[v={v:g}]", passed, float(v), threshold,
                "<", "min_squeezing_threshold(graph)"))
        rows["y_variance"].append(float(v))
        rows["nullifier_sum"].append(nullifier_sum)
        rows["verdict"].append(passed)
    record = ResultRecord(
        kind="cluster-check",
        inputs={"graph": graph.adjacency.tolist(), "y_variance": variances},
        scalars={"min_squeezing_threshold": threshold},
        series={"checks": rows},
        verdicts=verdicts,
    )
    return record


def _run_delayed_check(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    kappa = p.get_float("kappa", required=True)
    duration = p.get_float("duration", required=True)
    gap = p.get_float("gap", required=True)
    multiples = [int(n) for n in p.get_floats("multiples", [1, 2, 5, 50])]
    k_values = [int(k) for k in p.get_floats("k_values", [-3, -2, -1, 0, 1, 2, 3])]
    x_probe = p.get_float("x_variance", 10.0)
    period = duration + gap

    rows = {"n": [], "k": [], "omega": [], "lhs": [], "four_y_var": [],
            "entangled": [], "reduced_exactly": []}
    all_reduced = True
    for n in multiples:
        tau = n * period
        for k in k_values:
            omega = 2.0 * math.pi * k / tau
            y = float(laser.y_spectral_variance(omega, kappa))
            x = 0.0 if k == 0 else float(
                laser.x_spectral_variance(omega, kappa, laser.XNoiseModel(10.0)))
            res = multiplex.delayed_vlf(tau, omega, y, x)
            reduced = res.lhs == 4.0 * y
            all_reduced = all_reduced and reduced
            rows["n"].append(n)
            rows["k"].append(k)
            rows["omega"].append(omega)
            rows["lhs"].append(res.lhs)
            rows["four_y_var"].append(4.0 * y)
            rows["entangled"].append(res.entangled)
            rows["reduced_exactly"].append(reduced)

    tau_probe = multiples[0] * period
    omega_off = math.pi / tau_probe  # half a cycle: maximally off-grid
    probe = multiplex.delayed_vlf(tau_probe, omega_off,
                                  float(laser.y_spectral_variance(omega_off, kappa)),
                                  x_probe)
    record = ResultRecord(
        kind="delayed-check",
        inputs={"kappa": kappa, "duration": duration, "gap": gap,
                "multiples": multiples, "k_values": k_values,
                "x_variance": x_probe},
        scalars={"offgrid_lhs": probe.lhs, "offgrid_entangled": probe.entangled},
        series={"grid": rows},
    )
    record.verdicts = [
        Verdict("grid_reduction_exact", all_reduced, float(all_reduced), 1.0, "==",
                "on-grid frequencies reduce to 4*y_var exactly"),
        Verdict("offgrid_fails", not probe.entangled, probe.lhs,
                multiplex.DELAYED_VLF_BOUND, ">=", "DELAYED_VLF_BOUND"),
    ]
    return record


def _input_cov(p: Params) -> np.ndarray:
    vals = p.get_floats("input_cov", [VACUUM_VARIANCE, 0.0, VACUUM_VARIANCE])
    if len(vals) != 3:
        raise ConfigError(f"[{p.kind}] input_cov needs 3 numbers: xx, xy, yy")
    return np.array([[vals[0], vals[1]], [vals[1], vals[2]]])


def _cluster_from(p: Params, suffix: str = "") -> gates.TwoNodeCluster:
    v1 = p.get_float(f"y_variance_1{suffix}", p.get_float("y_variance", 0.05))
    v2 = p.get_float(f"y_variance_2{suffix}", p.get_float("y_variance", 0.05))
    factor = p.get_float("excess_factor", 10.0)
    return gates.TwoNodeCluster.from_y_variances(v1, v2, factor)


def _sampling_block(cfg: ExperimentConfig, out: gates.GateOutput,
                    input_blocks: dict) -> tuple:
    """Sample photocurrents, feed forward, and report the zeroed offsets."""
    if cfg.seed is None:
        raise ConfigError(f"[{cfg.kind}] sampling mode needs --seed")
    rng = np.random.default_rng(cfg.seed)
    currents = gates.sample_currents(out, input_blocks, rng)
    shifts = [e.substitute(currents).offset for e in out.exprs]
    corrected = gates.feed_forward(out, currents)
    offsets = [e.offset for e in corrected.exprs]
    leftover = [len(e.symbols) for e in corrected.exprs]
    scalars = {
        "currents": {k: _round12(v) for k, v in sorted(currents.items())},
        "feed_forward_shifts": [_round12(s) for s in shifts],
        "corrected_offsets": offsets,
        "corrected_symbol_count": leftover,
    }
    ok = all(o == 0.0 for o in offsets) and all(c == 0 for c in leftover)
    verdict = Verdict("feed_forward_offsets_zero", ok,
                      float(max(abs(o) for o in offsets)), 0.0, "==",
                      "feed-forward leaves no classical values")
    return scalars, verdict


def _run_gate(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    setting = gates.HomodyneSetting(
        p.get_angle("theta_in", required=True),
        p.get_angle("theta_1", required=True),
        p.get_float("beta_0", gates.DEFAULT_BETA_0))
    cluster = _cluster_from(p)
    cov_in = _input_cov(p)
    allow = p.get_bool("allow_unentangled", False)

    M = gates.gate_matrix(setting.theta_plus, setting.theta_minus)
    out = gates.single_step((x_quad(0), y_quad(0)), cluster, setting,
                            source_modes=(1, 2), allow_unentangled=allow)
    engine_cov = gates.output_covariance(out, {0: cov_in})
    oracle_cov = gates.single_step_covariance_oracle(cov_in, cluster, setting)
    noise_cov = expr_covariance(
        [e.without_classical() for e in out.noise_terms],
        gates.assemble_cov(out.cluster_blocks(), 3))
    det_err = abs(float(np.linalg.det(M)) - 1.0)
    oracle_err = float(np.max(np.abs(engine_cov - oracle_cov)))

    record = ResultRecord(
        kind="gate",
        inputs={"theta_in": setting.theta_in, "theta_1": setting.theta_1,
                "beta_0": setting.beta_0, "y_variances": cluster.y_variances,
                "x_variances": cluster.x_variances, "input_cov": cov_in.tolist()},
        scalars={"signal_matrix": M.tolist(),
                 "output_covariance": engine_cov.tolist(),
                 "oracle_covariance": oracle_cov.tolist(),
                 "noise_covariance": noise_cov.tolist(),
                 "residuals": {"det_minus_one": det_err, "oracle": oracle_err}},
    )
    record.verdicts = [
        Verdict("gate_determinant", det_err <= GATE_DET_TOL, det_err,
                GATE_DET_TOL, "<=", "GATE_DET_TOL"),
        Verdict("oracle_agreement", oracle_err <= STEP_ORACLE_TOL, oracle_err,
                STEP_ORACLE_TOL, "<=", "STEP_ORACLE_TOL"),
    ]
    if p.get_bool("sampling", False):
        scalars, verdict = _sampling_block(cfg, out, {0: cov_in})
        record.scalars["sampling"] = scalars
        record.verdicts.append(verdict)
    return record


def _run_compose(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    beta0 = p.get_float("beta_0", gates.DEFAULT_BETA_0)
    cov_in = _input_cov(p)
    cluster_1 = _cluster_from(p, "_step1") if "y_variance_1_step1" in p.keys() else _cluster_from(p)
    cluster_2 = _cluster_from(p, "_step2") if "y_variance_1_step2" in p.keys() else _cluster_from(p)
    allow = p.get_bool("allow_unentangled", False)

    target_text = p.get_str("target")
    solver_residual = None
    if target_text is not None:
        target = _parse_matrix(target_text)
        solution = gates.solve_phases(target, beta_0=beta0)
        s1, s2 = solution.setting_1, solution.setting_2
        solver_residual = solution.residual
    else:
        s1 = gates.HomodyneSetting(p.get_angle("theta_in_1", required=True),
                                   p.get_angle("theta_1_1", required=True), beta0)
        s2 = gates.HomodyneSetting(p.get_angle("theta_in_2", required=True),
                                   p.get_angle("theta_1_2", required=True), beta0)

    out = gates.compose_two_steps(s1, s2, (x_quad(0), y_quad(0)),
                                  (cluster_1, cluster_2),
                                  source_modes=((1, 2), (3, 4)),
                                  allow_unentangled=allow)
    engine_cov = gates.output_covariance(out, {0: cov_in})
    mid = gates.single_step_covariance_oracle(cov_in, cluster_1, s1)
    oracle_cov = gates.single_step_covariance_oracle(mid, cluster_2, s2)
    oracle_err = float(np.max(np.abs(engine_cov - oracle_cov)))
    det_err = abs(float(np.linalg.det(out.signal_matrix)) - 1.0)

    record = ResultRecord(
        kind="compose",
        inputs={"theta_in_1": s1.theta_in, "theta_1_1": s1.theta_1,
                "theta_in_2": s2.theta_in, "theta_1_2": s2.theta_1,
                "beta_0": beta0, "input_cov": cov_in.tolist(),
                "y_variances": [cluster_1.y_variances, cluster_2.y_variances]},
        scalars={"signal_matrix": out.signal_matrix.tolist(),
                 "output_covariance": engine_cov.tolist(),
                 "oracle_covariance": oracle_cov.tolist(),
                 "residuals": {"det_minus_one": det_err, "oracle": oracle_err}},
    )
    record.verdicts = [
        Verdict("net_determinant", det_err <= 1e-9, det_err, 1e-9, "<=",
                "composed gate stays determinant-one"),
        Verdict("oracle_agreement", oracle_err <= STEP_ORACLE_TOL, oracle_err,
                STEP_ORACLE_TOL, "<=", "STEP_ORACLE_TOL"),
    ]
    if solver_residual is not None:
        record.scalars["solver_residual"] = solver_residual
        record.verdicts.append(Verdict(
            "phase_solver_residual", solver_residual <= PHASE_RESIDUAL_TOL,
            solver_residual, PHASE_RESIDUAL_TOL, "<=", "PHASE_RESIDUAL_TOL"))
    if p.get_bool("sampling", False):
        scalars, verdict = _sampling_block(cfg, out, {0: cov_in})
        record.scalars["sampling"] = scalars
        record.verdicts.append(verdict)
    return record


def _run_cz(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    a_text, b_text = p.get_str("a"), p.get_str("b")
    if (a_text is None) != (b_text is None):
        raise ConfigError("[cz] provide both blocks a and b, or neither")
    canonical = a_text is None
    coeffs = (gates.canonical_cz_coefficients() if canonical
              else gates.TwoModeCoefficients(_parse_matrix(a_text), _parse_matrix(b_text)))
    matrix = gates.cz_transform(coeffs)
    omega = omega_matrix(2)
    sympl_err = float(np.max(np.abs(matrix @ omega @ matrix.T - omega)))
    record = ResultRecord(
        kind="cz",
        inputs={"a": coeffs.a.tolist(), "b": coeffs.b.tolist(),
                "canonical": canonical},
        scalars={"matrix": matrix.tolist(), "symplectic_residual": sympl_err},
    )
    record.verdicts = [
        Verdict("symplectic", sympl_err < SYMPLECTIC_TOL, sympl_err,
                SYMPLECTIC_TOL, "<", "SYMPLECTIC_TOL"),
    ]
    if canonical:
        exact = bool(np.array_equal(matrix, gates.CZ_MATRIX))
        record.verdicts.append(Verdict(
            "matches_entangling_target", exact, float(exact), 1.0, "==",
            "canonical blocks reproduce the entangling matrix exactly"))
    return record


def _run_pipeline(cfg: ExperimentConfig) -> ResultRecord:
    p = cfg.params
    duration = p.get_float("duration", required=True)
    gap = p.get_float("gap", required=True)
    lanes = p.get_int("lanes", required=True)
    ticks = p.get_int("ticks_per_gap", 100)
    beta0 = p.get_float("beta_0", gates.DEFAULT_BETA_0)
    allow = p.get_bool("allow_unentangled", False)

    settings = []
    for lane in range(lanes):
        key = f"settings_lane{lane}"
        text = p.get_str(key)
        if text is None:
            raise ConfigError(f"[pipeline] missing {key!r} "
                              "(semicolon-separated 'theta_in, theta_1' pairs)")
        lane_settings = []
        for pair in text.split(";"):
            angles = [parse_angle(tok) for tok in pair.split(",") if tok.strip()]
            if len(angles) != 2:
                raise ConfigError(f"[pipeline] {key}: each step needs two angles")
            lane_settings.append(gates.HomodyneSetting(angles[0], angles[1], beta0))
        settings.append(lane_settings)
    steps = len(settings[0])
    if any(len(s) != steps for s in settings):
        raise ConfigError("[pipeline] all lanes need the same number of steps")

    cluster = _cluster_from(p)
    clusters = [cluster] * (lanes * steps)
    inputs = [(x_quad(0), y_quad(0)) for _ in range(lanes)]
    result = multiplex.simulate_pipeline(duration, gap, inputs, clusters, settings,
                                         ticks_per_gap=ticks,
                                         allow_unentangled=allow)

    cov_in = _input_cov(p)
    isolation = 0.0
    lane_rows = {"lane": [], "signal": [], "covariance": []}
    for lane, out in enumerate(result.outputs):
        direct = gates.run_steps(inputs[lane], [cluster] * steps, settings[lane],
                                 allow_unentangled=allow)
        delta = max(
            float(np.max(np.abs(out.signal_matrix - direct.signal_matrix))),
            float(np.max(np.abs(gates.output_covariance(out, {0: cov_in})
                                - gates.output_covariance(direct, {0: cov_in})))))
        isolation = max(isolation, delta)
        lane_rows["lane"].append(lane)
        lane_rows["signal"].append(out.signal_matrix.tolist())
        lane_rows["covariance"].append(
            gates.output_covariance(out, {0: cov_in}).tolist())

    collisions = result.collisions()
    record = ResultRecord(
        kind="pipeline",
        inputs={"duration": duration, "gap": gap, "lanes": lanes,
                "steps": steps, "ticks_per_gap": ticks},
        scalars={"delay": result.delay.tau,
                 "delay_multiple_of_gap": lanes,
                 "collisions": collisions,
                 "lane_isolation_residual": isolation,
                 "event_count": len(result.events),
                 "lanes_detail": lane_rows},
    )
    record.verdicts = [
        Verdict("no_collisions", collisions == 0, float(collisions), 0.0, "==",
                "lanes never share a beam-splitter event"),
        Verdict("lane_isolation", isolation <= LANE_ISOLATION_TOL, isolation,
                LANE_ISOLATION_TOL, "<=", "LANE_ISOLATION_TOL"),
    ]
    if p.get_bool("sampling", False):
        if cfg.seed is None:
            raise ConfigError("[pipeline] sampling mode needs --seed")
        rng = np.random.default_rng(cfg.seed)
        offsets_ok = True
        worst = 0.0
        for out in result.outputs:
            currents = gates.sample_currents(out, {0: cov_in}, rng)
            corrected = gates.feed_forward(out, currents)
            for e in corrected.exprs:
                offsets_ok = offsets_ok and e.offset == 0.0 and not e.symbols
                worst = max(worst, abs(e.offset))
        record.verdicts.append(Verdict(
            "feed_forward_offsets_zero", offsets_ok, worst, 0.0, "==",
            "feed-forward leaves no classical values"))
    record.events = result.events
    return record


def sample_homodyne(output: gates.GateOutput, input_blocks, seed: int):
    """Draw photocurrents for a gate output and apply feed-forward.

    Returns (currents, corrected GateOutput); the corrected expressions
    carry exactly zero classical offsets.  Reproducible for a fixed seed.
    """
    if seed is None:
        raise ConfigError("sampling mode needs a seed")
    rng = np.random.default_rng(seed)
    currents = gates.sample_currents(output, input_blocks, rng)
    return currents, gates.feed_forward(output, currents)


_RUNNERS = {
    "spectrum": _run_spectrum,
    "cluster-check": _run_cluster_check,
    "delayed-check": _run_delayed_check,
    "gate": _run_gate,
    "compose": _run_compose,
    "cz": _run_cz,
    "pipeline": _run_pipeline,
}


def run(cfg: ExperimentConfig) -> ResultRecord:
    """Run one experiment; deterministic for a fixed config and seed."""
    if cfg.kind not in _RUNNERS:
        raise ConfigError(f"unknown experiment kind {cfg.kind!r}")
    return _RUNNERS[cfg.kind](cfg)


def write_outputs(record: ResultRecord, cfg: ExperimentConfig) -> list:
    """Write the JSON record, CSV series, and event log; return the paths."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []
    record_path = out / f"{record.kind}.json"
    record_path.write_text(record.to_json())
    written.append(record_path)
    if cfg.fmt == "csv":
        csv_path = out / f"{record.kind}.csv"
        lines = ["name,value,threshold,comparison,passed"]
        for v in record.verdicts:
            lines.append(f"{v.name},{_fmt(v.value)},{_fmt(v.threshold)},"
                         f"{v.comparison},{int(v.passed)}")
        csv_path.write_text("\n".join(lines) + "\n")
        written.append(csv_path)
    for name in record.series:
        path = out / f"{record.kind}_{name}.csv"
        path.write_text(record.series_csv(name))
        written.append(path)
    events = getattr(record, "events", None)
    if events:
        path = out / "events.jsonl"
        path.write_text(multiplex.events_to_jsonl(events))
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cvmbqc",
        description="Simulator of Gaussian one-way computation on two-node "
                    "cluster ensembles from pulsed squeezed light.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        k = sub.add_parser(kind, help=f"run the {kind} experiment")
        k.add_argument("--config", required=True, help="INI config file")
        k.add_argument("--out", default="out", help="output directory")
        k.add_argument("--seed", type=int, default=None, help="sampling seed")
        k.add_argument("--format", choices=("csv", "json"), default="json",
                       dest="fmt", help="main record format")
    args = parser.parse_args(argv)

    try:
        params = load_params(args.config, args.kind)
        cfg = ExperimentConfig(args.kind, params, args.seed, Path(args.out), args.fmt)
        record = run(cfg)
        paths = write_outputs(record, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for v in record.verdicts:
        print(v.line())
    for path in paths:
        print(f"wrote {path}")
    return 0 if record.passed else 1


if __name__ == "__main__":
    sys.exit(main())
