"""Randomized property checks for the game's feedback operator and kernels.

Each check replays deterministic seeds and reports its worst observed
residual against a fixed threshold.  These are the ground-truth oracles the
solvers rely on: gradient consistency against finite differences, operator
monotonicity, the trace-norm Lipschitz bound, linearity of the feedback, and
Pauli-basis reconstruction.
"""

from __future__ import annotations

import numpy as np

from . import linalg, rng
from .game import (
    JointState,
    QuantumGame,
    expected_utility,
    linearity_check,
    monotonicity_residual,
    payoff_gradient_alice,
    payoff_gradient_bob,
    random_density,
    random_direction,
    random_game,
)

MONOTONICITY_TOL = 1e-9
GRADIENT_FD_RTOL = 1e-5
GRADIENT_FD_STEP = 1e-6
LIPSCHITZ_EXCESS_TOL = 1e-9
LINEARITY_TOL = 1e-10
PAULI_TOL = 1e-10

PROPERTY_NAMES = ("monotonicity", "gradient-fd", "lipschitz", "linearity", "pauli")


def _random_joint(game: QuantumGame, gen) -> JointState:
    return JointState(
        random_density(game.dim_alice, gen), random_density(game.dim_bob, gen)
    )


def check_monotonicity(game: QuantumGame, gen, samples: int) -> float:
    """Worst |<F(X) - F(Y), X - Y>| over random profile pairs (exactly zero)."""
    worst = 0.0
    for _ in range(samples):
        x = _random_joint(game, gen)
        y = _random_joint(game, gen)
        worst = max(worst, abs(monotonicity_residual(game, x, y)))
    return worst


def check_gradient_fd(game: QuantumGame, gen, samples: int) -> float:
    """Worst relative error of central differences against the gradients."""
    worst = 0.0
    h = GRADIENT_FD_STEP
    for _ in range(samples):
        state = _random_joint(game, gen)
        for player in ("alice", "bob"):
            if player == "alice":
                delta = random_direction(game.dim_alice, gen)
                up = expected_utility(game, JointState(state.alice + h * delta, state.bob))
                dn = expected_utility(game, JointState(state.alice - h * delta, state.bob))
                grad = payoff_gradient_alice(game, state.bob)
                analytic = linalg.trace_inner(delta, grad).real
            else:
                delta = random_direction(game.dim_bob, gen)
                up = expected_utility(game, JointState(state.alice, state.bob + h * delta))
                dn = expected_utility(game, JointState(state.alice, state.bob - h * delta))
                # Bob's payoff gradient is the descent direction of u.
                grad = -payoff_gradient_bob(game, state.alice)
                analytic = linalg.trace_inner(delta, grad).real
            fd = (up - dn) / (2.0 * h)
            denom = max(abs(analytic), 1e-12)
            worst = max(worst, abs(fd - analytic) / denom)
    return worst


def check_lipschitz(game: QuantumGame, gen, samples: int) -> float:
    """Worst excess of the (spectral, trace)-norm ratio over ||U||_inf."""
    worst = -np.inf
    for _ in range(samples):
        x = _random_joint(game, gen)
        y = _random_joint(game, gen)
        d_fa = payoff_gradient_alice(game, x.bob) - payoff_gradient_alice(game, y.bob)
        d_fb = payoff_gradient_bob(game, x.alice) - payoff_gradient_bob(game, y.alice)
        num = max(linalg.spectral_norm(d_fa), linalg.spectral_norm(d_fb))
        den = linalg.schatten1_norm(x.alice - y.alice) + linalg.schatten1_norm(
            x.bob - y.bob
        )
        if den > 1e-14:
            worst = max(worst, num / den - game.u_inf_norm)
    return float(worst)


def check_linearity(game: QuantumGame, gen, samples: int) -> float:
    """Worst deviation of F on convex mixes from the mix of F values."""
    worst = 0.0
    for _ in range(samples):
        s1 = _random_joint(game, gen)
        s2 = _random_joint(game, gen)
        lam = float(gen.uniform(0.0, 1.0))
        worst = max(worst, linearity_check(game, s1, s2, lam))
    return worst


def check_pauli(dim_qubits: int, gen, samples: int) -> float:
    """Worst reconstruction error of random matrices from Pauli coefficients,
    plus the imaginary defect of coefficients of Hermitian matrices."""
    worst = 0.0
    dim = 2**dim_qubits
    for _ in range(samples):
        m = rng.complex_normal(gen, (dim, dim))
        coeffs = linalg.pauli_decompose(m, dim_qubits)
        rec = linalg.pauli_reconstruct(coeffs, dim_qubits)
        worst = max(worst, float(np.max(np.abs(rec - m))))
        h = linalg.hermitianize(m)
        h_coeffs = linalg.pauli_decompose(h, dim_qubits)
        worst = max(worst, max(abs(c.imag) for c in h_coeffs.values()))
    return worst


_THRESHOLDS = {
    "monotonicity": MONOTONICITY_TOL,
    "gradient-fd": GRADIENT_FD_RTOL,
    "lipschitz": LIPSCHITZ_EXCESS_TOL,
    "linearity": LINEARITY_TOL,
    "pauli": PAULI_TOL,
}

_GAME_CHECKS = {
    "monotonicity": check_monotonicity,
    "gradient-fd": check_gradient_fd,
    "lipschitz": check_lipschitz,
    "linearity": check_linearity,
}


def run_properties(
    names=PROPERTY_NAMES,
    max_qubits: int = 3,
    n_seeds: int = 10,
    samples: int = 50,
) -> dict:
    """Run the named checks over (k, k)-qubit games for k up to max_qubits.

    One game per (dims, seed) is built and shared across all checks, then
    dropped, so memory stays bounded at the largest single game.
    """
    if max_qubits < 1:
        raise ValueError("max_qubits must be >= 1")
    if n_seeds < 1 or samples < 1:
        raise ValueError("n_seeds and samples must be >= 1")
    for name in names:
        if name not in PROPERTY_NAMES:
            raise ValueError(
                f"unknown property {name!r}; expected one of {PROPERTY_NAMES}"
            )
    worsts = {name: 0.0 if name != "lipschitz" else -np.inf for name in names}
    game_checks = [n for n in names if n in _GAME_CHECKS]
    dims = [(k, k) for k in range(1, max_qubits + 1)]
    for n, m in dims:
        for seed in range(n_seeds):
            if game_checks:
                game = random_game(n, m, seed=seed)
                for name in game_checks:
                    gen = rng.stream(seed, rng.STREAM_PROPERTIES)
                    worsts[name] = max(
                        worsts[name], _GAME_CHECKS[name](game, gen, samples)
                    )
            if "pauli" in names:
                gen = rng.stream(seed, rng.STREAM_PROPERTIES)
                worsts["pauli"] = max(
                    worsts["pauli"], check_pauli(min(n + m, 3), gen, samples)
                )
    results = []
    for name in names:
        worst = float(worsts[name])
        results.append(
            {
                "property": name,
                "worst": worst,
                "threshold": _THRESHOLDS[name],
                "passed": worst < _THRESHOLDS[name],
                "dims": [list(d) for d in dims],
                "seeds": n_seeds,
                "samples": samples,
            }
        )
    return {
        "format_version": 1,
        "properties": results,
        "all_passed": all(r["passed"] for r in results),
    }
