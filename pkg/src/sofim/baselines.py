"""Reference optimizers for comparison and cross-checking.

Contains SGD with momentum (optional coupled weight decay and cosine
annealing), Adam with canonical defaults, and two deliberately small-scale
dense oracles: natural-gradient descent with the empirical Fisher matrix,
and exact Newton for quadratic problems.  The dense oracles refuse to run
above :data:`DENSE_FIM_CAP` dimensions; they exist to verify the O(d)
optimizer, not to compete with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sofim import _kernels
from sofim.exceptions import ConfigError, DimensionMismatchError, ScaleCapError

#: Dense-Fisher operations refuse dimensions above this.
DENSE_FIM_CAP = 200

#: Default damping for the natural-gradient oracle; the empirical Fisher of
#: a finite batch is rank-deficient, so some damping is always required.
DEFAULT_NGD_DAMPING = 1e-3


@dataclass(frozen=True)
class SgdConfig:
    """SGD hyperparameters.  ``schedule`` is ``"constant"`` or ``"cosine"``;
    cosine anneals from ``eta`` to 0 over ``total_steps``."""

    eta: float
    momentum: float = 0.0
    weight_decay: float = 0.0
    schedule: str = "constant"
    total_steps: int | None = None

    def __post_init__(self):
        if not (self.eta > 0):
            raise ConfigError(f"eta must be > 0, got {self.eta}")
        if not (0.0 <= self.momentum < 1.0):
            raise ConfigError(f"momentum must lie in [0, 1), got {self.momentum}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if self.schedule not in ("constant", "cosine"):
            raise ConfigError(f"schedule must be 'constant' or 'cosine', got {self.schedule!r}")
        if self.schedule == "cosine" and (self.total_steps is None or self.total_steps < 1):
            raise ConfigError("cosine schedule requires total_steps >= 1")


@dataclass(frozen=True)
class AdamConfig:
    """Adam hyperparameters with the canonical defaults."""

    eta: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        if not (self.eta > 0):
            raise ConfigError(f"eta must be > 0, got {self.eta}")
        if not (0.0 <= self.beta1 < 1.0):
            raise ConfigError(f"beta1 must lie in [0, 1), got {self.beta1}")
        if not (0.0 <= self.beta2 < 1.0):
            raise ConfigError(f"beta2 must lie in [0, 1), got {self.beta2}")
        if not (self.epsilon > 0):
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")


def sgd_learning_rate(cfg: SgdConfig, step_index: int) -> float:
    """Scheduled learning rate at ``step_index`` (0-based).

    Cosine: ``eta(s) = eta_min + 0.5 * (eta0 - eta_min) * (1 + cos(pi * s / total_steps))``
    with ``eta_min = 0``, so ``eta(0) = eta0`` and ``eta(total_steps) = 0``.
    """
    if cfg.schedule == "constant":
        return cfg.eta
    s = min(step_index, cfg.total_steps)
    return 0.5 * cfg.eta * (1.0 + math.cos(math.pi * s / cfg.total_steps))


def sgd_momentum_step(w, velocity, g, cfg: SgdConfig, step_index: int):
    """One momentum-SGD step; returns ``(w_new, velocity_new)``.

    Coupled weight decay is folded into the gradient before the velocity
    update: ``g' = g + weight_decay * w``; ``v' = momentum * v + g'``;
    ``w' = w - eta(step_index) * v'``.
    """
    w = np.asarray(w, dtype=np.float64)
    velocity = np.asarray(velocity, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if not (w.shape == velocity.shape == g.shape):
        raise DimensionMismatchError(
            f"shape mismatch: w {w.shape}, velocity {velocity.shape}, g {g.shape}"
        )
    g_eff = g + cfg.weight_decay * w
    v_new = cfg.momentum * velocity + g_eff
    w_new = w - sgd_learning_rate(cfg, step_index) * v_new
    return w_new, v_new


def adam_step(w, m, v, g, cfg: AdamConfig, t: int):
    """One Adam step at iteration ``t`` (1-based); returns ``(w', m', v')``."""
    if t < 1:
        raise ConfigError(f"t must be >= 1, got {t}")
    w = np.asarray(w, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if w.shape != g.shape:
        raise DimensionMismatchError(f"shape mismatch: w {w.shape}, g {g.shape}")
    m_new = cfg.beta1 * m + (1.0 - cfg.beta1) * g
    v_new = cfg.beta2 * v + (1.0 - cfg.beta2) * np.square(g)
    m_hat = m_new / (1.0 - cfg.beta1**t)
    v_hat = v_new / (1.0 - cfg.beta2**t)
    w_new = w - cfg.eta * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
    return w_new, m_new, v_new


@dataclass
class EmpiricalFim:
    """Dense empirical Fisher matrix ``mean_i g_i g_i^T`` (small scale only)."""

    matrix: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.matrix, dtype=np.float64)
        if f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise DimensionMismatchError(f"Fisher matrix must be square, got {f.shape}")
        asym = np.max(np.abs(f - f.T)) if f.size else 0.0
        if asym > 1e-12:
            raise ConfigError(f"Fisher matrix asymmetry {asym:.3e} exceeds 1e-12")
        self.matrix = f

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def empirical_fim(per_sample_grads, cap: int = DENSE_FIM_CAP) -> EmpiricalFim:
    """Average of the per-sample gradient outer products.

    ``per_sample_grads`` is a sequence of length-d vectors (or a (B, d)
    array).  Refuses d above ``cap``: this is a verification oracle with
    O(B d^2) cost, not a large-scale operation.
    """
    grads = np.atleast_2d(np.asarray(per_sample_grads, dtype=np.float64))
    if grads.size == 0:
        raise ConfigError("per_sample_grads must contain at least one gradient")
    d = grads.shape[1]
    if d > cap:
        raise ScaleCapError(f"dense Fisher oracle capped at d <= {cap}, got d = {d}")
    f = grads.T @ grads / grads.shape[0]
    # Enforce exact symmetry against BLAS round-off before validation.
    f = 0.5 * (f + f.T)
    return EmpiricalFim(matrix=f)


def ngd_step(w, per_sample_grads, eta: float, damping: float = DEFAULT_NGD_DAMPING):
    """Natural-gradient step with the dense empirical Fisher.

    ``w' = w - eta * (F + damping * I)^{-1} g_bar`` where ``g_bar`` is the
    mean per-sample gradient.  Damping must be positive because the
    empirical Fisher of a finite batch is rank-deficient.
    """
    if not (damping > 0):
        raise ConfigError(f"damping must be > 0, got {damping}")
    w = np.asarray(w, dtype=np.float64)
    grads = np.atleast_2d(np.asarray(per_sample_grads, dtype=np.float64))
    if grads.shape[1] != w.shape[0]:
        raise DimensionMismatchError(
            f"gradients have length {grads.shape[1]} but w has length {w.shape[0]}"
        )
    fim = empirical_fim(grads)
    g_bar = grads.mean(axis=0)
    a = fim.matrix + damping * np.eye(fim.dim)
    direction = np.linalg.solve(a, g_bar)
    return w - eta * direction


def newton_step_quadratic(w, problem, eta: float):
    """Exact Newton step ``w - eta * H^{-1} grad`` for a problem exposing a
    constant positive-definite Hessian."""
    w = np.asarray(w, dtype=np.float64)
    hess = problem.exact_hessian(w)
    try:
        np.linalg.cholesky(hess)
    except np.linalg.LinAlgError as exc:
        raise ConfigError("Hessian is not positive definite") from exc
    g = problem.grad(w)
    return w - eta * np.linalg.solve(hess, g)


class SgdMomentumOptimizer:
    """Stateful momentum-SGD stepper; mutates ``w`` in place via the kernel
    backend.  Equivalent to iterating :func:`sgd_momentum_step`."""

    needs_per_sample_grads = False
    needs_hessian = False

    def __init__(self, dim: int, config: SgdConfig):
        self.config = config
        self.velocity = np.zeros(dim)
        self.step_count = 0

    def step(self, w: np.ndarray, g: np.ndarray) -> None:
        lr = sgd_learning_rate(self.config, self.step_count)
        _kernels.sgd_momentum_update(
            w, self.velocity, g, lr, self.config.momentum, self.config.weight_decay
        )
        self.step_count += 1


class AdamOptimizer:
    """Stateful Adam stepper; mutates ``w`` in place via the kernel backend.
    Equivalent to iterating :func:`adam_step`."""

    needs_per_sample_grads = False
    needs_hessian = False

    def __init__(self, dim: int, config: AdamConfig):
        self.config = config
        self.m = np.zeros(dim)
        self.v = np.zeros(dim)
        self.step_count = 0

    def step(self, w: np.ndarray, g: np.ndarray) -> None:
        self.step_count += 1
        cfg = self.config
        _kernels.adam_update(
            w,
            self.m,
            self.v,
            g,
            cfg.eta,
            cfg.beta1,
            cfg.beta2,
            1.0 - cfg.beta1**self.step_count,
            1.0 - cfg.beta2**self.step_count,
            cfg.epsilon,
        )
