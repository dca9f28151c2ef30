"""Iterative equilibrium solvers over density-matrix strategies.

Three update rules share one driver:

* ``mda``  -- dual averaging: play the mirror image of the accumulated
  feedback, one gradient per iteration.  With the entropy regularizer this is
  the matrix multiplicative-weights update Λ(eta W).
* ``mmp``  -- mirror prox: an extrapolation step followed by a correction
  step, two gradients per iteration.
* ``ommp`` -- optimistic mirror prox: the extrapolation reuses the previous
  gradient, so only one fresh gradient is needed per iteration after the
  first.  With the entropy regularizer this is optimistic matrix
  multiplicative weights; with the Frobenius regularizer it is optimistic
  projected gradient.

Entropy-regularized updates run in the dual (log) domain: states are carried
as accumulated dual matrices and materialized through the logit map, which
avoids taking logarithms of nearly singular iterates.  All solvers start from
the maximally mixed profile and report the uniform average of the played
iterates, whose duality gap is the convergence certificate.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry, linalg
from .game import (
    JointState,
    QuantumGame,
    duality_gap,
    lipschitz_estimate,
    payoff_gradient,
    uniform_state,
)

ALGORITHMS = ("mda", "mmp", "ommp")
STEP_DECAYS = ("none", "inverse_sqrt")

# alias -> (algorithm, regularizer, step_decay)
ALIASES = {
    "mmwu": ("mda", geometry.VN_ENTROPY_ID, "none"),
    "mmwu-sd": ("mda", geometry.VN_ENTROPY_ID, "inverse_sqrt"),
    "mda-frobenius": ("mda", geometry.FROBENIUS_ID, "none"),
    "mmp-entropy": ("mmp", geometry.VN_ENTROPY_ID, "none"),
    "mmp-frobenius": ("mmp", geometry.FROBENIUS_ID, "none"),
    "ommwu": ("ommp", geometry.VN_ENTROPY_ID, "none"),
    "omeg": ("ommp", geometry.FROBENIUS_ID, "none"),
}

AUTO_LIPSCHITZ_SAMPLES = 500
AUTO_LIPSCHITZ_MARGIN = 1.1


class TraceRow(NamedTuple):
    """One convergence checkpoint: gaps of the running average and last iterate."""

    t: int
    gap_avg: float
    gap_last: float
    wall_time_ns: int


@dataclass(frozen=True)
class SolverConfig:
    """Full specification of a solver run.

    step_size is a positive float or "auto"; auto uses mu / (2 gamma) with
    gamma = ||U||_inf for the entropy regularizer and a sampled Frobenius
    Lipschitz estimate (seeded by `seed`) otherwise.  step_decay
    "inverse_sqrt" scales the step by 1/sqrt(t+1) at iteration t.
    """

    algorithm: str = "ommp"
    regularizer: str = geometry.VN_ENTROPY_ID
    step_size: float | str = "auto"
    step_decay: str = "none"
    max_iters: int = 1000
    target_gap: float = 0.0
    gap_check_interval: int = 50
    seed: int = 0

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        geometry.from_id(self.regularizer)
        if self.step_decay not in STEP_DECAYS:
            raise ValueError(
                f"unknown step decay {self.step_decay!r}; expected one of {STEP_DECAYS}"
            )
        if self.step_size != "auto":
            step = float(self.step_size)
            if not (step > 0.0 and math.isfinite(step)):
                raise ValueError(f"step_size must be positive and finite, got {step!r}")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if not (float(self.target_gap) >= 0.0):
            raise ValueError("target_gap must be >= 0")
        if int(self.gap_check_interval) < 1:
            raise ValueError("gap_check_interval must be >= 1")

    @classmethod
    def from_alias(cls, alias: str, **overrides) -> "SolverConfig":
        """Build a config from a named solver variant (e.g. "ommwu", "mmwu-sd")."""
        try:
            algorithm, regularizer, step_decay = ALIASES[alias]
        except KeyError:
            raise ValueError(
                f"unknown solver alias {alias!r}; expected one of {sorted(ALIASES)}"
            ) from None
        return cls(
            algorithm=algorithm,
            regularizer=regularizer,
            step_decay=step_decay,
            **overrides,
        )

    @classmethod
    def from_json_dict(cls, data: dict) -> "SolverConfig":
        """Parse the external config document {"algorithm": alias, ...}."""
        if not isinstance(data, dict):
            raise ValueError("solver config must be a JSON object")
        allowed = {
            "algorithm",
            "step_size",
            "max_iters",
            "target_gap",
            "gap_check_interval",
            "seed",
        }
        unknown = data.keys() - allowed
        if unknown:
            raise ValueError(f"unknown solver config keys {sorted(unknown)}")
        if "algorithm" not in data:
            raise ValueError("solver config must name an algorithm alias")
        overrides = {k: data[k] for k in data.keys() - {"algorithm"}}
        for key in ("max_iters", "gap_check_interval", "seed"):
            if key in overrides and (
                isinstance(overrides[key], bool) or not isinstance(overrides[key], int)
            ):
                raise ValueError(f"{key} must be an integer")
        cfg = cls.from_alias(data["algorithm"], **overrides)
        cfg.validate()
        return cfg


def alias_of(cfg: SolverConfig) -> str | None:
    """Inverse of from_alias when the combination has a name."""
    key = (cfg.algorithm, cfg.regularizer, cfg.step_decay)
    for alias, combo in ALIASES.items():
        if combo == key:
            return alias
    return None


def default_step_size(reg: geometry.Regularizer, gamma: float) -> float:
    """Largest step with the contraction guarantee: mu / (2 gamma)."""
    if not (gamma > 0.0 and math.isfinite(gamma)):
        raise ValueError(f"Lipschitz constant must be positive, got {gamma!r}")
    return reg.strong_convexity_modulus / (2.0 * gamma)


def resolve_gamma(game: QuantumGame, reg: geometry.Regularizer, seed: int) -> float:
    """Lipschitz constant for auto step sizing under the regularizer's norms."""
    if reg.kind == geometry.VN_ENTROPY_ID:
        return game.u_inf_norm
    est = lipschitz_estimate(game, "fro-fro", AUTO_LIPSCHITZ_SAMPLES, seed)
    return AUTO_LIPSCHITZ_MARGIN * est


def resolve_step_size(game: QuantumGame, cfg: SolverConfig) -> float:
    """Materialize cfg.step_size; the zero observable admits any step, use 1."""
    if cfg.step_size != "auto":
        return float(cfg.step_size)
    reg = geometry.from_id(cfg.regularizer)
    gamma = resolve_gamma(game, reg, cfg.seed)
    if gamma <= 0.0:
        return 1.0
    return default_step_size(reg, gamma)


class MdaStepper:
    """Dual averaging: W += F(Ψ_t); Ψ_{t+1} = mirror(eta_t W)."""

    gradient_calls_per_iter = 1

    def __init__(self, game, reg, eta_fn, psi0):
        self.game = game
        self.reg = reg
        self.eta_fn = eta_fn
        self.dual = (
            np.zeros_like(psi0.alice),
            np.zeros_like(psi0.bob),
        )

    def step(self, t: int, psi: JointState) -> tuple[JointState, int]:
        grad = payoff_gradient(self.game, psi)
        self.dual = (self.dual[0] + grad.alice, self.dual[1] + grad.bob)
        eta = self.eta_fn(t)
        nxt = JointState(
            self.reg.mirror_map(eta * self.dual[0]),
            self.reg.mirror_map(eta * self.dual[1]),
        )
        return nxt, 1


class MmpStepper:
    """Mirror prox: extrapolate from Ψ_t with F(Ψ_t), correct with F(Φ_{t+1}).

    Entropy mode keeps Ψ_t in the dual domain, so log Ψ_t is never formed.
    """

    gradient_calls_per_iter = 2

    def __init__(self, game, reg, eta_fn, psi0):
        self.game = game
        self.reg = reg
        self.eta_fn = eta_fn
        self.entropy = reg.kind == geometry.VN_ENTROPY_ID
        self.momentum = psi0
        if self.entropy:
            self.dual = (np.zeros_like(psi0.alice), np.zeros_like(psi0.bob))

    def step(self, t: int, psi: JointState) -> tuple[JointState, int]:
        eta = self.eta_fn(t)
        g1 = payoff_gradient(self.game, psi)
        if self.entropy:
            half = geometry.dual_proximal_accumulate(self.dual, g1, eta)
            phi = JointState(geometry.logit_map(half[0]), geometry.logit_map(half[1]))
            g2 = payoff_gradient(self.game, phi)
            self.dual = geometry.dual_proximal_accumulate(self.dual, g2, eta)
            nxt = JointState(
                geometry.logit_map(self.dual[0]), geometry.logit_map(self.dual[1])
            )
        else:
            phi = JointState(
                self.reg.proximal_map(psi.alice, g1.alice, eta),
                self.reg.proximal_map(psi.bob, g1.bob, eta),
            )
            g2 = payoff_gradient(self.game, phi)
            nxt = JointState(
                self.reg.proximal_map(psi.alice, g2.alice, eta),
                self.reg.proximal_map(psi.bob, g2.bob, eta),
            )
        self.momentum = phi
        return nxt, 2


class OmmpStepper:
    """Optimistic mirror prox: extrapolate from the momentum point Φ_t with the
    stored gradient, then advance the momentum with one fresh gradient.

    Entropy mode carries Φ_t as an accumulated dual matrix (optimistic matrix
    multiplicative weights); Frobenius mode keeps it primal (optimistic
    projected gradient).
    """

    gradient_calls_per_iter = 1

    def __init__(self, game, reg, eta_fn, psi0):
        self.game = game
        self.reg = reg
        self.eta_fn = eta_fn
        self.entropy = reg.kind == geometry.VN_ENTROPY_ID
        if self.entropy:
            self.dual = (np.zeros_like(psi0.alice), np.zeros_like(psi0.bob))
        else:
            self._momentum = psi0
        self.last_gradient = None

    @property
    def momentum(self) -> JointState:
        """Current momentum profile Φ_t, materialized on demand in entropy mode."""
        if self.entropy:
            return JointState(
                geometry.logit_map(self.dual[0]), geometry.logit_map(self.dual[1])
            )
        return self._momentum

    def step(self, t: int, psi: JointState) -> tuple[JointState, int]:
        calls = 0
        if self.last_gradient is None:
            self.last_gradient = payoff_gradient(self.game, psi)
            calls += 1
        eta = self.eta_fn(t)
        if self.entropy:
            ahead = geometry.dual_proximal_accumulate(self.dual, self.last_gradient, eta)
            nxt = JointState(geometry.logit_map(ahead[0]), geometry.logit_map(ahead[1]))
            fresh = payoff_gradient(self.game, nxt)
            calls += 1
            self.dual = geometry.dual_proximal_accumulate(self.dual, fresh, eta)
        else:
            nxt = JointState(
                self.reg.proximal_map(self._momentum.alice, self.last_gradient.alice, eta),
                self.reg.proximal_map(self._momentum.bob, self.last_gradient.bob, eta),
            )
            fresh = payoff_gradient(self.game, nxt)
            calls += 1
            self._momentum = JointState(
                self.reg.proximal_map(self._momentum.alice, fresh.alice, eta),
                self.reg.proximal_map(self._momentum.bob, fresh.bob, eta),
            )
        self.last_gradient = fresh
        return nxt, calls


_STEPPERS = {"mda": MdaStepper, "mmp": MmpStepper, "ommp": OmmpStepper}


def make_stepper(game: QuantumGame, cfg: SolverConfig, eta: float, psi0: JointState):
    """Instantiate the update rule named by cfg with a resolved step size."""
    reg = geometry.from_id(cfg.regularizer)
    if cfg.step_decay == "inverse_sqrt":
        eta_fn = lambda t: eta / math.sqrt(t + 1.0)
    else:
        eta_fn = lambda t: eta
    return _STEPPERS[cfg.algorithm](game, reg, eta_fn, psi0)


@dataclass
class RunResult:
    """Outcome of a solver run: averaged profile, trace, and accounting."""

    average: JointState
    last: JointState
    trace: list
    iterations: int
    gradient_calls: int
    step_size: float


def run(
    game: QuantumGame,
    cfg: SolverConfig,
    checkpoints=None,
) -> RunResult:
    """Run a solver from the maximally mixed profile.

    Gaps are evaluated every cfg.gap_check_interval iterations (or at the
    explicit sorted `checkpoints`), always including the final iteration; the
    run stops early once the average-iterate gap reaches cfg.target_gap (when
    positive).  The average at checkpoint T spans the played iterates
    Ψ_0 .. Ψ_{T-1}.  Gap evaluations are diagnostics and are not counted as
    gradient calls.
    """
    cfg.validate()
    eta = resolve_step_size(game, cfg)
    psi = uniform_state(game)
    stepper = make_stepper(game, cfg, eta, psi)
    explicit = None
    if checkpoints is not None:
        explicit = {int(c) for c in checkpoints if 1 <= int(c) <= cfg.max_iters}
    sum_a = np.zeros_like(psi.alice)
    sum_b = np.zeros_like(psi.bob)
    rows: list[TraceRow] = []
    calls = 0
    done = 0
    start = time.perf_counter_ns()
    for t in range(cfg.max_iters):
        sum_a += psi.alice
        sum_b += psi.bob
        try:
            psi, fresh = stepper.step(t, psi)
        except (np.linalg.LinAlgError, linalg.NumericalError) as exc:
            raise linalg.NumericalError(
                f"eigensolver failed to converge at iteration {t + 1}"
            ) from exc
        calls += fresh
        done = t + 1
        at_checkpoint = (
            done == cfg.max_iters
            or (explicit is not None and done in explicit)
            or (explicit is None and done % cfg.gap_check_interval == 0)
        )
        if at_checkpoint:
            avg = JointState(
                linalg.hermitianize(sum_a / done), linalg.hermitianize(sum_b / done)
            )
            try:
                gap_avg = duality_gap(game, avg)
                gap_last = duality_gap(game, psi)
            except (np.linalg.LinAlgError, linalg.NumericalError) as exc:
                raise linalg.NumericalError(
                    f"eigensolver failed to converge at iteration {done}"
                ) from exc
            if not (math.isfinite(gap_avg) and math.isfinite(gap_last)):
                raise linalg.NumericalError(
                    f"non-finite duality gap at iteration {done}"
                )
            rows.append(
                TraceRow(done, gap_avg, gap_last, time.perf_counter_ns() - start)
            )
            if cfg.target_gap > 0.0 and gap_avg <= cfg.target_gap:
                break
    average = JointState(
        linalg.hermitianize(sum_a / done), linalg.hermitianize(sum_b / done)
    )
    return RunResult(
        average=average,
        last=psi,
        trace=rows,
        iterations=done,
        gradient_calls=calls,
        step_size=eta,
    )
