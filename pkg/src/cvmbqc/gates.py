"""Measurement-based Gaussian gates on two-node cluster resources.

One computation step mixes the input mode with the first node of a two-node
cluster on a symmetric beam splitter and homodynes both beam-splitter
outputs.  With local-oscillator phases theta_in and theta_1 the surviving
node carries

    (X_out, Y_out) = M(tp, tm) (x_in, y_in)
                     - sqrt(2) (y1, y2)
                     + (1 / (beta0 sqrt(2) sin tm)) C (i_in, i_1),

    M(tp, tm) = 1/sin(tm) [[cos tp + cos tm,  sin tp],
                           [-sin tp,          cos tp - cos tm]],
    C = [[cos theta_1, -cos theta_in], [-sin theta_1, sin theta_in]],

where tp = theta_in + theta_1, tm = theta_in - theta_1, (y1, y2) are the
squeezed source quadratures behind the cluster and i_in, i_1 the recorded
photocurrents.  The relation is an exact operator identity under the port
and detector conventions fixed below; feed-forward displacements remove the
photocurrent term entirely.

Port and detector conventions (fixed by requiring the identity to hold
exactly):

* the cluster is prepared from U = (1/sqrt 2)[[1, -i], [i, -1]] acting on
  the two squeezed sources;
* the mixing beam splitter sends the pair (input, node 1) to the difference
  port (node - input)/sqrt(2) and the sum port (node + input)/sqrt(2);
* the theta_in detector sits on the difference port, the theta_1 detector
  on the sum port, both measuring cos(theta) x + sin(theta) y;
* balanced detection yields i = 2 * beta0 * (measured quadrature).

Two chained steps compose to M(tp', tm') M(tp, tm), which reaches every
determinant-one real 2x2 matrix; :func:`solve_phases` inverts that map in
closed form.  The two-mode entangling gate is obtained by sandwiching two
parallel single-mode gates between symmetric beam splitters
(:func:`cz_transform`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .cluster import VLF_BOUND, ClusterGraph, cluster_unitary, default_two_node_q, unitary_to_symplectic
from .quadrature import (
    GaussianState,
    LinearQuadratureExpr,
    embed,
    expr_covariance,
    x_quad,
    y_quad,
)

_SQRT2 = math.sqrt(2.0)

#: Homodyne settings with |sin(theta_in - theta_1)| at or below this are degenerate.
DEGENERACY_TOL = 1e-9

#: Default local-oscillator amplitude (bright; only scales the classical term).
DEFAULT_BETA_0 = 1e6

#: Residual bound for the two-step phase solver.
PHASE_RESIDUAL_TOL = 1e-6

#: Opaque tag for the classical detection envelope carried by gate outputs.
ENVELOPE_TAG = "L(t)"


class DegenerateHomodynePhasesError(ValueError):
    """Raised when sin(theta_in - theta_1) vanishes and the gate is undefined."""


class PhaseSolveError(RuntimeError):
    """Raised when the two-step decomposition misses the residual target."""


@dataclass(frozen=True)
class HomodyneSetting:
    """Local-oscillator phases and amplitude for one measurement step."""

    theta_in: float
    theta_1: float
    beta_0: float = DEFAULT_BETA_0

    def __post_init__(self):
        if self.beta_0 <= 0:
            raise ValueError("local-oscillator amplitude must be positive")

    @property
    def theta_plus(self) -> float:
        return self.theta_in + self.theta_1

    @property
    def theta_minus(self) -> float:
        return self.theta_in - self.theta_1


@dataclass(frozen=True)
class TwoNodeCluster:
    """Measurement resource: two squeezed sources entangled as a two-node cluster.

    Holds the source quadrature variances; x variances default to the
    minimum-uncertainty partner scaled by an excess-noise factor.
    """

    y_variances: tuple
    x_variances: tuple

    def __post_init__(self):
        vy = tuple(float(v) for v in self.y_variances)
        vx = tuple(float(v) for v in self.x_variances)
        if len(vy) != 2 or len(vx) != 2:
            raise ValueError("a two-node cluster has exactly two sources")
        if any(v <= 0 for v in vy + vx):
            raise ValueError("source variances must be positive")
        object.__setattr__(self, "y_variances", vy)
        object.__setattr__(self, "x_variances", vx)

    @classmethod
    def from_y_variances(cls, v1: float, v2: float, excess: float = 1.0) -> "TwoNodeCluster":
        return cls((v1, v2), (excess / (16.0 * v1), excess / (16.0 * v2)))

    def vlf_sum(self) -> float:
        """Nullifier-variance sum of the generated cluster: 2 (v1 + v2)."""
        return 2.0 * (self.y_variances[0] + self.y_variances[1])

    @property
    def entangled(self) -> bool:
        return self.vlf_sum() < VLF_BOUND


def gate_matrix(theta_plus: float, theta_minus: float) -> np.ndarray:
    """Determinant-one gate matrix realized by one measurement step."""
    s = math.sin(theta_minus)
    if abs(s) <= DEGENERACY_TOL:
        raise DegenerateHomodynePhasesError(
            f"degenerate homodyne phases: |sin(theta_minus)| = {abs(s):.2e}")
    cp, cm, sp = math.cos(theta_plus), math.cos(theta_minus), math.sin(theta_plus)
    return np.array([[cp + cm, sp], [-sp, cp - cm]]) / s


def cluster_node_exprs(source_modes: tuple) -> tuple:
    """Cluster-node quadratures over the two squeezed source modes.

    Returns ((X1, Y1), (X2, Y2)) for sources (m1, m2) entangled through
    U = (1/sqrt 2)[[1, -i], [i, -1]].
    """
    m1, m2 = source_modes
    h = 1.0 / _SQRT2
    X1 = h * (x_quad(m1) + y_quad(m2))
    Y1 = h * (y_quad(m1) - x_quad(m2))
    X2 = (-h) * (x_quad(m2) + y_quad(m1))
    Y2 = h * (x_quad(m1) - y_quad(m2))
    return (X1, Y1), (X2, Y2)


@dataclass(frozen=True)
class GateOutput:
    """Output-mode expressions of one or more measurement steps.

    exprs: (X_out, Y_out) including photocurrent symbols; noise_terms: the
    accumulated -sqrt(2) squeezed-quadrature contributions; measured: the
    time-ordered (current name, measured quadrature expression) records;
    signal_matrix: the net 2x2 gate applied to the original input.
    """

    exprs: tuple
    noise_terms: tuple
    measured: tuple
    signal_matrix: np.ndarray
    settings: tuple
    clusters: tuple
    source_modes: tuple
    envelope_tag: str = ENVELOPE_TAG

    def cluster_blocks(self) -> dict:
        """Per-mode 2x2 covariance blocks of all cluster sources used."""
        blocks = {}
        for cluster, (m1, m2) in zip(self.clusters, self.source_modes):
            u1, u2 = cluster.x_variances
            v1, v2 = cluster.y_variances
            blocks[m1] = np.diag([u1, v1])
            blocks[m2] = np.diag([u2, v2])
        return blocks

    def current_symbols(self) -> tuple:
        return tuple(name for name, _ in self.measured)


def assemble_cov(blocks: Mapping[int, np.ndarray], n_modes: int | None = None) -> np.ndarray:
    """Block-diagonal covariance from per-mode 2x2 blocks (vacuum elsewhere)."""
    if n_modes is None:
        n_modes = max(blocks) + 1 if blocks else 1
    cov = 0.25 * np.eye(2 * n_modes)
    for mode, block in blocks.items():
        block = np.asarray(block, dtype=float)
        if block.shape != (2, 2):
            raise ValueError("each covariance block must be 2x2")
        cov[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = block
    return cov


def output_covariance(output: GateOutput, input_blocks: Mapping[int, np.ndarray],
                      n_modes: int | None = None) -> np.ndarray:
    """Quantum covariance of the output pair over input plus source modes."""
    blocks = dict(input_blocks)
    blocks.update(output.cluster_blocks())
    if n_modes is None:
        used = set(blocks)
        for e in output.exprs:
            used |= e.modes()
        n_modes = max(used) + 1
    cov = assemble_cov(blocks, n_modes)
    return expr_covariance([e.without_classical() for e in output.exprs], cov)


def _fresh_modes(exprs, requested):
    if requested is not None:
        m1, m2 = requested
        if m1 == m2:
            raise ValueError("the two source modes must be distinct")
        return int(m1), int(m2)
    used = set()
    for e in exprs:
        used |= e.modes()
    base = max(used) + 1 if used else 0
    return base, base + 1


def single_step(input_exprs: tuple, cluster: TwoNodeCluster, setting: HomodyneSetting,
                source_modes: tuple | None = None, label: str = "",
                allow_unentangled: bool = False) -> GateOutput:
    """One homodyne measurement step on a two-node cluster resource.

    ``input_exprs`` is the (x, y) pair of the mode to transform; its symbols
    (photocurrents of earlier steps) propagate through.  Fresh source modes
    are allocated after the input's modes unless given explicitly.
    """
    x_in, y_in = input_exprs
    if cluster.vlf_sum() >= VLF_BOUND:
        if not allow_unentangled:
            raise ValueError(
                "cluster resource is not entangled (nullifier sum "
                f"{cluster.vlf_sum():g} >= {VLF_BOUND}); pass allow_unentangled=True to force")
        warnings.warn("running a measurement step on an unentangled cluster resource",
                      stacklevel=2)
    M = gate_matrix(setting.theta_plus, setting.theta_minus)  # validates phases
    m1, m2 = _fresh_modes(input_exprs, source_modes)
    (X1, Y1), _ = cluster_node_exprs((m1, m2))

    cin, sin_ = math.cos(setting.theta_in), math.sin(setting.theta_in)
    c1, s1 = math.cos(setting.theta_1), math.sin(setting.theta_1)
    h = 1.0 / _SQRT2
    # difference port carries theta_in, sum port carries theta_1
    measured_in = h * (cin * (X1 - x_in) + sin_ * (Y1 - y_in))
    measured_1 = h * (c1 * (X1 + x_in) + s1 * (Y1 + y_in))
    name_in = f"i_in{label}"
    name_1 = f"i_1{label}"

    sm = math.sin(setting.theta_minus)
    pref = 1.0 / (setting.beta_0 * _SQRT2 * sm)
    noise_x = (-_SQRT2) * y_quad(m1)
    noise_y = (-_SQRT2) * y_quad(m2)
    classical_x = LinearQuadratureExpr(symbols={name_in: pref * c1, name_1: -pref * cin})
    classical_y = LinearQuadratureExpr(symbols={name_in: -pref * s1, name_1: pref * sin_})

    x_out = M[0, 0] * x_in + M[0, 1] * y_in + noise_x + classical_x
    y_out = M[1, 0] * x_in + M[1, 1] * y_in + noise_y + classical_y
    return GateOutput(
        exprs=(x_out, y_out),
        noise_terms=(noise_x, noise_y),
        measured=((name_in, measured_in), (name_1, measured_1)),
        signal_matrix=M,
        settings=(setting,),
        clusters=(cluster,),
        source_modes=((m1, m2),),
    )


def feed_forward(output: GateOutput, currents: Mapping[str, float] | None = None) -> GateOutput:
    """Displace away every classical term from the output expressions.

    After feed-forward both expressions carry a classical offset of exactly
    zero and no photocurrent symbols; the quantum parts are untouched.
    Applying it again is a no-op.
    """
    currents = dict(currents or {})
    for e in output.exprs:
        missing = [s for s in e.symbols if s not in currents]
        if missing:
            raise ValueError(f"missing measured currents for feed-forward: {missing}")
    cleaned = tuple(LinearQuadratureExpr(e.coeffs) for e in output.exprs)
    return replace(output, exprs=cleaned)


def run_steps(input_exprs: tuple, clusters: Sequence[TwoNodeCluster],
              settings: Sequence[HomodyneSetting],
              source_modes: Sequence[tuple] | None = None,
              allow_unentangled: bool = False) -> GateOutput:
    """Chain measurement steps; the signal part becomes M_k ... M_2 M_1.

    Noise contributions of earlier steps are propagated through the later
    gate matrices and photocurrent records accumulate in time order.
    """
    if len(clusters) != len(settings) or not settings:
        raise ValueError("need one cluster per setting, at least one step")
    exprs = input_exprs
    acc = None
    for index, (cluster, setting) in enumerate(zip(clusters, settings)):
        modes = source_modes[index] if source_modes is not None else None
        step = single_step(exprs, cluster, setting, modes, label=f"[{index + 1}]",
                           allow_unentangled=allow_unentangled)
        if acc is None:
            acc = step
        else:
            M = step.signal_matrix
            noise = (
                M[0, 0] * acc.noise_terms[0] + M[0, 1] * acc.noise_terms[1] + step.noise_terms[0],
                M[1, 0] * acc.noise_terms[0] + M[1, 1] * acc.noise_terms[1] + step.noise_terms[1],
            )
            acc = GateOutput(
                exprs=step.exprs,
                noise_terms=noise,
                measured=acc.measured + step.measured,
                signal_matrix=M @ acc.signal_matrix,
                settings=acc.settings + step.settings,
                clusters=acc.clusters + step.clusters,
                source_modes=acc.source_modes + step.source_modes,
            )
        exprs = acc.exprs
    return acc


def compose_two_steps(setting_1: HomodyneSetting, setting_2: HomodyneSetting,
                      input_exprs: tuple, clusters: tuple,
                      source_modes: tuple | None = None,
                      allow_unentangled: bool = False) -> GateOutput:
    """Two chained measurement steps; the signal part becomes M2 @ M1."""
    return run_steps(input_exprs, clusters, (setting_1, setting_2),
                     source_modes, allow_unentangled)


def resolve_measured(output: GateOutput) -> tuple:
    """Measured quadratures as pure operator expressions over the sources.

    Earlier currents appearing inside later measured expressions are
    substituted by their defining operators (current = 2 beta0 quadrature),
    in time order.
    """
    betas = []
    for setting in output.settings:
        betas += [setting.beta_0, setting.beta_0]
    resolved = {}
    ordered = []
    for (name, expr), beta in zip(output.measured, betas):
        full = LinearQuadratureExpr(expr.coeffs, offset=expr.offset)
        for sym, coeff in expr.symbols.items():
            if sym not in resolved:
                raise ValueError(f"measured expression references unknown current {sym!r}")
            sym_expr, sym_beta = resolved[sym]
            full = full + (coeff * 2.0 * sym_beta) * sym_expr
        resolved[name] = (full, beta)
        ordered.append((name, full, beta))
    return tuple(ordered)


def sample_currents(output: GateOutput, input_blocks: Mapping[int, np.ndarray],
                    rng: np.random.Generator) -> dict:
    """Draw photocurrent records from their joint Gaussian law.

    The joint covariance of all measured quadratures is built from the
    resolved operator expressions; currents are scaled by 2 beta0.
    """
    ordered = resolve_measured(output)
    exprs = [e for _, e, _ in ordered]
    blocks = dict(input_blocks)
    blocks.update(output.cluster_blocks())
    used = set(blocks)
    for e in exprs:
        used |= e.modes()
    cov = assemble_cov(blocks, max(used) + 1 if used else 1)
    sigma = expr_covariance(exprs, cov)
    means = np.array([e.offset for e in exprs])
    draws = rng.multivariate_normal(means, sigma, method="svd")
    return {name: 2.0 * beta * val
            for (name, _, beta), val in zip(ordered, draws)}


# ---------------------------------------------------------------------------
# Homodyne conditioning (Schur complement) and the covariance oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConditionedGaussian:
    """Result of conditioning a Gaussian state on homodyne outcomes.

    state: conditional state of the kept modes (mean uses the supplied
    outcomes, or the prior mean when none are given); bayes_gain maps
    measured-quadrature deviations to conditional-mean shifts of the kept
    quadratures; measured_cov is the covariance of the measured quadratures.
    """

    state: GaussianState
    kept_modes: tuple
    measured_modes: tuple
    bayes_gain: np.ndarray
    measured_cov: np.ndarray


def condition_homodyne(state: GaussianState, measured_angles: Mapping[int, float],
                       outcomes: Mapping[int, float] | None = None) -> ConditionedGaussian:
    """Condition a Gaussian state on homodyne results via the Schur complement.

    ``measured_angles`` maps mode -> local-oscillator angle; the measured
    quadrature of each mode is cos(angle) x + sin(angle) y.  Measured modes
    must be disjoint from the kept modes (every mode is either measured or
    kept).  The conditional covariance of the kept block is

        Sigma_kk - Sigma_km pinv(Sigma_mm) Sigma_km^T

    with the pseudo-inverse taken on the measured subspace; a measured
    variance below 1e-14 is rejected as ill-conditioned.
    """
    n = state.n_modes
    measured_modes = tuple(sorted(measured_angles))
    if not measured_modes:
        raise ValueError("no measured modes given")
    if any(not 0 <= m < n for m in measured_modes):
        raise ValueError("measured mode out of range")
    kept_modes = tuple(m for m in range(n) if m not in measured_angles)
    if not kept_modes:
        raise ValueError("no kept modes remain")

    P = np.zeros((len(measured_modes), 2 * n))
    for row, mode in enumerate(measured_modes):
        angle = float(measured_angles[mode])
        P[row, 2 * mode] = math.cos(angle)
        P[row, 2 * mode + 1] = math.sin(angle)
    kept_idx = [i for m in kept_modes for i in (2 * m, 2 * m + 1)]
    K = np.zeros((len(kept_idx), 2 * n))
    for row, idx in enumerate(kept_idx):
        K[row, idx] = 1.0

    sigma_mm = P @ state.cov @ P.T
    if np.min(np.linalg.eigvalsh(sigma_mm)) < 1e-14:
        raise ValueError("ill-conditioned measured variance (< 1e-14)")
    sigma_km = K @ state.cov @ P.T
    gain = sigma_km @ np.linalg.pinv(sigma_mm, hermitian=True)
    cov_cond = K @ state.cov @ K.T - gain @ sigma_km.T
    cov_cond = 0.5 * (cov_cond + cov_cond.T)

    mean_kept = state.mean[kept_idx]
    if outcomes is not None:
        m_vals = np.array([float(outcomes[m]) for m in measured_modes])
        mean_kept = mean_kept + gain @ (m_vals - P @ state.mean)
    return ConditionedGaussian(GaussianState(mean_kept, cov_cond),
                               kept_modes, measured_modes, gain, sigma_mm)


def step_joint_state(input_cov: np.ndarray, cluster: TwoNodeCluster) -> GaussianState:
    """Three-mode state after cluster generation and the mixing beam splitter.

    Mode 0 is the difference port, mode 1 the sum port, mode 2 the surviving
    cluster node.  Built entirely from matrix maps; this is the path
    independent of the symbolic gate algebra.
    """
    input_cov = np.asarray(input_cov, dtype=float)
    if input_cov.shape != (2, 2):
        raise ValueError("input covariance must be 2x2")
    u1, u2 = cluster.x_variances
    v1, v2 = cluster.y_variances
    joint = np.zeros((6, 6))
    joint[:2, :2] = input_cov
    joint[2:4, 2:4] = np.diag([u1, v1])
    joint[4:6, 4:6] = np.diag([u2, v2])
    S_cluster = embed(unitary_to_symplectic(
        cluster_unitary(ClusterGraph.two_node(), default_two_node_q())), (1, 2), 3)
    # difference/sum ports of the pair (input, node 1); same mixing on x and y
    W = np.array([[-1.0, 1.0], [1.0, 1.0]]) / _SQRT2
    S_mix = np.zeros((4, 4))
    for j in range(2):
        for k in range(2):
            S_mix[2 * j, 2 * k] = W[j, k]
            S_mix[2 * j + 1, 2 * k + 1] = W[j, k]
    S = embed(S_mix, (0, 1), 3) @ S_cluster
    return GaussianState(np.zeros(6), S @ joint @ S.T)


def protocol_gains(setting: HomodyneSetting) -> np.ndarray:
    """Feed-forward gains in measured-quadrature units (current = 2 beta0 q)."""
    sm = math.sin(setting.theta_minus)
    if abs(sm) <= DEGENERACY_TOL:
        raise DegenerateHomodynePhasesError("degenerate homodyne phases")
    cin, sin_ = math.cos(setting.theta_in), math.sin(setting.theta_in)
    c1, s1 = math.cos(setting.theta_1), math.sin(setting.theta_1)
    return (_SQRT2 / sm) * np.array([[c1, -cin], [-s1, sin_]])


def single_step_covariance_oracle(input_cov: np.ndarray, cluster: TwoNodeCluster,
                                  setting: HomodyneSetting) -> np.ndarray:
    """Output covariance of one step, via conditioning instead of gate algebra.

    Conditions the post-beam-splitter state on the two homodyne results
    (Schur complement), then restores the outcome scatter left by the fixed
    feed-forward gains (law of total covariance):

        Sigma_out = Sigma_cond + (G* - G) Sigma_mm (G* - G)^T

    with G* the conditional-mean gains and G the protocol gains.  Agrees
    with the symbolic engine to floating-point accuracy and is independent
    of the anti-squeezed variances.
    """
    joint = step_joint_state(input_cov, cluster)
    cond = condition_homodyne(joint, {0: setting.theta_in, 1: setting.theta_1})
    D = cond.bayes_gain - protocol_gains(setting)
    return cond.state.cov + D @ cond.measured_cov @ D.T


# ---------------------------------------------------------------------------
# Phase solving: invert the two-step composition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseSolution:
    """Two homodyne settings realizing a target determinant-one matrix."""

    setting_1: HomodyneSetting
    setting_2: HomodyneSetting
    residual: float
    matrix: np.ndarray


def _setting_from_half_sum_diff(theta_plus, theta_minus, beta_0):
    return HomodyneSetting((theta_plus + theta_minus) / 2.0,
                           (theta_plus - theta_minus) / 2.0, beta_0)


def solve_phases(target: np.ndarray, tol: float = PHASE_RESIDUAL_TOL,
                 beta_0: float = DEFAULT_BETA_0) -> PhaseSolution:
    """Find settings with gate(setting_2) @ gate(setting_1) = target.

    Uses the rotation form of the one-step gate,
    M(tp, tm) = R(-tp/2) diag(a, 1/a) R(-tp/2) with a = cot(tm/2): writing
    the target as R(A) diag(s, 1/s) R(B) (signed SVD), the pair

        step 1: tp = -2B, tm = 2*atan2(1, s)      (= R(B) diag(s,1/s) R(B))
        step 2: tp = B - A, tm = pi/2             (pure rotation R(A - B))

    solves the problem in closed form.  A damped least-squares polish runs
    only if the closed form misses ``tol`` (it does not, for well-scaled
    targets); a residual still above ``tol`` raises :class:`PhaseSolveError`
    carrying the best residual rather than returning a wrong answer.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (2, 2):
        raise ValueError("target must be a 2x2 matrix")
    det = float(np.linalg.det(target))
    if abs(det - 1.0) > 1e-9:
        raise ValueError(f"target determinant {det:.12g} is not 1")

    U, s, Vt = np.linalg.svd(target)
    if np.linalg.det(U) < 0:  # det(U) det(Vt) = +1, flip both
        U = U @ np.diag([1.0, -1.0])
        Vt = np.diag([1.0, -1.0]) @ Vt
    A = math.atan2(U[1, 0], U[0, 0])
    B = math.atan2(Vt[1, 0], Vt[0, 0])
    sigma = math.sqrt(s[0] / s[1])

    tp1, tm1 = -2.0 * B, 2.0 * math.atan2(1.0, sigma)
    tp2, tm2 = B - A, math.pi / 2.0

    def build(params):
        q1 = _setting_from_half_sum_diff(params[0], params[1], beta_0)
        q2 = _setting_from_half_sum_diff(params[2], params[3], beta_0)
        return q1, q2, gate_matrix(params[2], params[3]) @ gate_matrix(params[0], params[1])

    params = np.array([tp1, tm1, tp2, tm2])
    q1, q2, M = build(params)
    residual = float(np.max(np.abs(M - target)))

    if residual > tol:  # fallback polish; the closed form should not get here
        def cost(p):
            try:
                return (gate_matrix(p[2], p[3]) @ gate_matrix(p[0], p[1]) - target).ravel()
            except DegenerateHomodynePhasesError:
                return np.full(4, 1e6)

        fit = least_squares(cost, params, method="lm", xtol=1e-15, ftol=1e-15)
        q1f, q2f, Mf = build(fit.x)
        if float(np.max(np.abs(Mf - target))) < residual:
            q1, q2, M = q1f, q2f, Mf
            residual = float(np.max(np.abs(M - target)))
        if residual > tol:
            raise PhaseSolveError(
                f"target not reached: best residual {residual:.3e} exceeds {tol:g}")
    return PhaseSolution(q1, q2, residual, M)


# ---------------------------------------------------------------------------
# Two-mode entangling gate from parallel single-mode gates
# ---------------------------------------------------------------------------

# sqrt(2) times the two-mode symmetric beam splitter in (x1,y1,x2,y2) order;
# using it keeps integer coefficient choices exact: B G B = (B2 G B2) / 2.
_BS2 = np.array([
    [1.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 1.0],
    [1.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, -1.0],
])

#: The two-mode entangling target: each mode's x feeds the partner's y.
CZ_MATRIX = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 1.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [1.0, 0.0, 0.0, 1.0],
])


@dataclass(frozen=True)
class TwoModeCoefficients:
    """The two single-mode gate blocks applied between the beam splitters."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != (2, 2) or b.shape != (2, 2):
            raise ValueError("invalid blocks: both must be 2x2")
        for name, blk in (("a", a), ("b", b)):
            det = float(np.linalg.det(blk))
            if abs(det - 1.0) > 1e-9:
                raise ValueError(
                    f"invalid blocks: det({name}) = {det:.12g}, a realizable "
                    "single-mode Gaussian gate needs determinant 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def canonical_cz_coefficients() -> TwoModeCoefficients:
    """Block choice that turns the sandwich into the entangling gate exactly."""
    return TwoModeCoefficients(np.array([[1.0, 0.0], [1.0, 1.0]]),
                               np.array([[1.0, 0.0], [-1.0, 1.0]]))


def cz_transform(coeffs: TwoModeCoefficients) -> np.ndarray:
    """Sandwich blockdiag(a, b) between two symmetric beam splitters."""
    G = np.zeros((4, 4))
    G[:2, :2] = coeffs.a
    G[2:, 2:] = coeffs.b
    return (_BS2 @ G @ _BS2) / 2.0
