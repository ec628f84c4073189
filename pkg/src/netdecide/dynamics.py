"""Vector fields for networked opinion dynamics and their reductions.

All fields are pure functions of their inputs.  States are plain numpy
arrays; x_i > 0 means agent i favors alternative A.  The normalized model

    dx/dt = -D x + u A S(x) + beta

is the workhorse; the raw-parameter model carries inertia u_I and social
effort u_S separately, with u = u_S / u_I and beta = nu / u_I.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graphs import Graph, PopulationSpec


# ---------------------------------------------------------------------------
# Saturating nonlinearity
# ---------------------------------------------------------------------------

def _sech2(z):
    # 4 e^{-2|z|} / (1 + e^{-2|z|})^2, stable for large |z|
    e = np.exp(-2.0 * np.abs(z))
    return 4.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class Sigmoid:
    """Odd saturating nonlinearity with its first three derivatives.

    Any shipped family must be odd, strictly monotone, sector-(0,1] bounded
    (0 < S(z)/z <= 1 and S'(z) <= 1) and concave for z > 0.
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    d3: Callable[[np.ndarray], np.ndarray]


TANH = Sigmoid(
    name="tanh",
    value=np.tanh,
    d1=_sech2,
    d2=lambda z: -2.0 * np.tanh(z) * _sech2(z),
    d3=lambda z: _sech2(z) * (4.0 * np.tanh(z) ** 2 - 2.0 * _sech2(z)),
)


# ---------------------------------------------------------------------------
# Parameters and auxiliary state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Effort and information parameters of the raw-time model."""

    u_I: float = 1.0
    u_S: float = 1.0
    nu: np.ndarray | None = None

    def __post_init__(self):
        if self.u_I <= 0:
            raise ValueError("inertia gain u_I must be positive")
        if self.u_S < 0:
            raise ValueError("social effort gain u_S must be nonnegative")
        if self.nu is not None:
            object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))

    @property
    def u(self) -> float:
        """Normalized social effort u = u_S / u_I."""
        return self.u_S / self.u_I

    @property
    def beta(self) -> np.ndarray | None:
        """Normalized information vector beta = nu / u_I."""
        return None if self.nu is None else self.nu / self.u_I


def check_zero_sum(utilde: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    utilde = np.asarray(utilde, dtype=float)
    if abs(utilde.sum()) > tol:
        raise ValueError(
            f"effort heterogeneities must sum to zero (got {utilde.sum():.3e})"
        )
    return utilde


def beta_vector(spec: PopulationSpec, beta_a: float, beta_b: float) -> np.ndarray:
    """Information vector (+beta_A informed-A, -beta_B informed-B, 0 uninformed)."""
    return np.concatenate([
        np.full(spec.n1, float(beta_a)),
        np.full(spec.n2, -float(beta_b)),
        np.zeros(spec.n3),
    ])


@dataclass
class EstimatorState:
    """Auxiliary state of the average-opinion consensus estimator."""

    w: np.ndarray
    alpha: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("estimator gain alpha must be positive")
        self.w = np.asarray(self.w, dtype=float)

    def yhat(self, x: np.ndarray, g: Graph) -> np.ndarray:
        """Agent estimates of the average opinion, recomputed from (w, x)."""
        return g.laplacian @ self.w + x


@dataclass(frozen=True)
class AdaptiveConfig:
    """Slow-timescale gain and decision threshold of the adaptive loop."""

    epsilon: float = 0.01
    y_th: float = 0.5

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.y_th <= 0:
            raise ValueError("decision threshold y_th must be positive")
        if self.epsilon > 0.1:
            warnings.warn(
                f"epsilon = {self.epsilon} is large; the slow/fast timescale "
                "separation underpinning the adaptive analysis may not hold",
                stacklevel=2,
            )


@dataclass(frozen=True)
class DecisionConfig:
    eta: float
    delta_tol: float = 1e-6

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("decision threshold eta must be positive")
        if self.delta_tol < 0:
            raise ValueError("delta_tol must be nonnegative")


class Decision(enum.Enum):
    A = "decision_a"
    B = "decision_b"
    DEADLOCK_NO_DECISION = "deadlock_no_decision"
    DEADLOCK_DISAGREEMENT = "deadlock_disagreement"


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------

def full_field(x: np.ndarray, g: Graph, params: ModelParams,
               sigmoid: Sigmoid = TANH) -> np.ndarray:
    """Raw-time dynamics: -u_I D x + u_S A S(x) + nu."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValueError(f"state has shape {x.shape}, expected ({g.n},)")
    nu = params.nu if params.nu is not None else 0.0
    if params.nu is not None and params.nu.shape != (g.n,):
        raise ValueError("information vector nu has wrong length")
    return -params.u_I * g.degrees * x + params.u_S * (g.weights @ sigmoid.value(x)) + nu


def normalized_field(x: np.ndarray, g: Graph, u: float,
                     beta: np.ndarray | None = None,
                     sigmoid: Sigmoid = TANH) -> np.ndarray:
    """Normalized-time dynamics: -D x + u A S(x) + beta."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValueError(f"state has shape {x.shape}, expected ({g.n},)")
    if u < 0:
        raise ValueError("social effort u must be nonnegative")
    out = -g.degrees * x + u * (g.weights @ sigmoid.value(x))
    if beta is not None:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (g.n,):
            raise ValueError("information vector beta has wrong length")
        out = out + beta
    return out


def hetero_field(x: np.ndarray, g: Graph, ubar: float, utilde: np.ndarray,
                 beta: np.ndarray | None = None,
                 sigmoid: Sigmoid = TANH) -> np.ndarray:
    """Heterogeneous-effort dynamics: -D x + U A S(x) + beta, U = diag(ubar + utilde)."""
    x = np.asarray(x, dtype=float)
    utilde = check_zero_sum(utilde)
    efforts = ubar + utilde
    out = -g.degrees * x + efforts * (g.weights @ sigmoid.value(x))
    if beta is not None:
        out = out + np.asarray(beta, dtype=float)
    return out


def reduced3_field(y: np.ndarray, spec: PopulationSpec, u: float,
                   beta_a: float, beta_b: float,
                   sigmoid: Sigmoid = TANH) -> np.ndarray:
    """Three-group reduction of the structured network dynamics.

    Group 1 (informed about A) carries +beta_A and group 2 carries -beta_B,
    matching the per-agent information convention of the full model so that
    the reduced field is exactly the full field restricted to the
    group-consensus manifold.
    """
    y = np.asarray(y, dtype=float)
    n = spec.sizes
    a = spec.coupling
    d = spec.group_degrees()
    s = sigmoid.value(y)
    betas = (float(beta_a), -float(beta_b), 0.0)
    out = np.empty(3)
    for k in range(3):
        social = (n[k] - 1) * s[k] + sum(
            n[m] * a[k, m] * s[m] for m in range(3) if m != k
        )
        out[k] = -d[k] * y[k] + u * social + betas[k]
    return out


def ata_reduced3_field(y: np.ndarray, n: int, n3: int, u: float, beta: float,
                       sigmoid: Sigmoid = TANH) -> np.ndarray:
    """All-to-all swap-symmetric reduced model (n1 = n2 = n, unit coupling)."""
    y = np.asarray(y, dtype=float)
    big_n = 2 * n + n3
    s = sigmoid.value(y)
    return np.array([
        -(big_n - 1) * y[0] + u * ((n - 1) * s[0] + n * s[1] + n3 * s[2]) + beta,
        -(big_n - 1) * y[1] + u * (n * s[0] + (n - 1) * s[1] + n3 * s[2]) - beta,
        -(big_n - 1) * y[2] + u * (n * s[0] + n * s[1] + (n3 - 1) * s[2]),
    ])


def scalar_consensus_field(y: float, u: float, n_agents: int,
                           sigmoid: Sigmoid = TANH) -> float:
    """All-to-all dynamics restricted to the consensus manifold."""
    if n_agents < 2:
        raise ValueError("need at least two agents")
    return float(-(n_agents - 1) * y + u * (n_agents - 1) * sigmoid.value(y))


def estimator_field(est: EstimatorState, x: np.ndarray, g: Graph) -> np.ndarray:
    """dw/dt = -alpha sgn(L yhat), with sgn(0) = 0 entrywise."""
    yhat = est.yhat(x, g)
    return -est.alpha * np.sign(g.laplacian @ yhat)


def adaptive_field(x: np.ndarray, ubar: float, est: EstimatorState, g: Graph,
                   utilde: np.ndarray, beta: np.ndarray | None,
                   cfg: AdaptiveConfig,
                   sigmoid: Sigmoid = TANH) -> tuple[np.ndarray, float]:
    """Fast opinion field plus slow mean-effort update.

    The effort update uses the first agent's estimate of the average opinion;
    after the estimator has converged this equals eps * (y_th^2 - y^2).
    """
    dx = hetero_field(x, g, ubar, utilde, beta, sigmoid)
    y1 = est.yhat(x, g)[0]
    dubar = cfg.epsilon * (cfg.y_th ** 2 - y1 ** 2)
    return dx, float(dubar)


# ---------------------------------------------------------------------------
# Decision metrics
# ---------------------------------------------------------------------------

def group_opinion(x: np.ndarray) -> float:
    """Average opinion y = mean(x)."""
    return float(np.mean(x))


def disagreement(x_ss: np.ndarray) -> float:
    """delta = |mean(x)| - mean(|x|); zero iff all entries share one sign."""
    x_ss = np.asarray(x_ss, dtype=float)
    return float(abs(x_ss.mean()) - np.abs(x_ss).mean())


def classify_decision(x_ss: np.ndarray, cfg: DecisionConfig) -> Decision:
    """Label a settled state as a decision for A/B or a form of deadlock."""
    x_ss = np.asarray(x_ss, dtype=float)
    delta = disagreement(x_ss)
    mean = group_opinion(x_ss)
    if abs(delta) <= cfg.delta_tol and mean > cfg.eta:
        return Decision.A
    if abs(delta) <= cfg.delta_tol and mean < -cfg.eta:
        return Decision.B
    if np.abs(x_ss).max() <= cfg.delta_tol:
        return Decision.DEADLOCK_NO_DECISION
    if abs(delta) > cfg.delta_tol:
        return Decision.DEADLOCK_DISAGREEMENT
    return Decision.DEADLOCK_NO_DECISION
