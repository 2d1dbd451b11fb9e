from __future__ import annotations

import math
import time

import numpy as np

from src.actor.loss import actor_loss_grad
from src.actor.network import ActorNet
from src.analysis.bound import make_diagnostics
from src.critic.bootdqn import PriorFunction, bootdqnp_loss_grad, bootdqnp_objective
from src.critic.ensemble import CriticEnsemble, ensemble_values
from src.critic.pbac_loss import PriorConfig, kl_from_values, pbac_loss, pbac_loss_grad, pbac_objective, propagation_coefficient
from src.numerics.gradcheck import central_difference, relative_error
from src.numerics.mlp import init_mlp, mlp_backward, mlp_forward
from src.oracle.suite import OracleReport
from src.replay.buffer import Minibatch
from src.replay.masks import draw_mask

GRAD_TOL = 1e-4
HAND_TOL = 1e-9

HAND_DIVERSITY = 2.5
HAND_COHERENCE = 2.5
HAND_PROPAGATION = -0.75 * math.log(2.0)
HAND_KL = 0.25 * (10.0 - 2.0 * math.log(2.0))
# risk=2, kl=0, delta=0.05, nu=1, n=256, lambda_bar=3, R=1, gamma=0.5 (B=4)
BOUND_EXAMPLE_RHS = (2.0 + 48.0 / 2048.0 - math.log(0.05)) / 0.25


def hand_example() -> dict[str, np.ndarray | float]:
    """n=1, K=2, gamma=0.5, sigma0^2=1, r=1, X=[0,2] at (s,a), target X=[2,0] at (s',a')."""
    return {
        "values": np.array([[0.0, 2.0]]),
        "target_values": np.array([[2.0, 0.0]]),
        "r": np.array([1.0]),
        "done": np.array([0.0]),
        "mask": np.ones((1, 2)),
        "gamma": 0.5,
        "sigma0_sq": 1.0,
    }


def random_batch(rng: np.random.Generator, n: int, obs_dim: int, act_dim: int) -> Minibatch:
    return Minibatch(
        s=rng.normal(size=(n, obs_dim)),
        a=rng.uniform(-1.0, 1.0, size=(n, act_dim)),
        r=rng.normal(size=n),
        s_next=rng.normal(size=(n, obs_dim)),
        done=(rng.random(n) < 0.2).astype(np.float64),
        indices=np.arange(n),
    )


def _small_dims(rng: np.random.Generator) -> tuple[int, int, int, int, int]:
    return (
        int(rng.integers(1, 4)),  # obs
        int(rng.integers(1, 3)),  # act
        int(rng.integers(3, 6)),  # hidden; layer norm over 2 units saturates to +-1
        int(rng.integers(2, 4)),  # K
        int(rng.integers(2, 6)),  # n
    )


def gradcheck_mlp(rng: np.random.Generator) -> float:
    depth = int(rng.integers(1, 4))
    sizes = [int(rng.integers(2, 6))] + [int(rng.integers(2, 9)) for _ in range(depth)]
    net = init_mlp(sizes, rng)
    x = rng.normal(size=(3, sizes[0]))
    w = rng.normal(size=(3, net.out_dim))

    def loss() -> float:
        return float((mlp_forward(net, x)[0] * w).sum())

    grads, _ = mlp_backward(mlp_forward(net, x)[1], w)
    return relative_error(grads.arrays(), central_difference(loss, net.arrays()))


def gradcheck_pbac(rng: np.random.Generator) -> float:
    obs, act, hidden, k, n = _small_dims(rng)
    ens = CriticEnsemble.create(obs, act, k, hidden, rng, gamma=float(rng.uniform(0.3, 0.99)))
    batch = random_batch(rng, n, obs, act)
    mask = draw_mask(n, k, 0.2, rng)
    nxt = rng.uniform(-1.0, 1.0, size=(n, act))
    logp = rng.normal(size=n)
    alpha = float(rng.uniform(0.0, 1.0))
    prior = PriorConfig(float(rng.uniform(0.5, 2.0)))

    def loss() -> float:
        return pbac_loss(ens, batch, mask, nxt, logp, alpha, prior).total

    _, grads = pbac_loss_grad(ens, batch, mask, nxt, logp, alpha, prior)
    return relative_error(grads.arrays(), central_difference(loss, ens.member_arrays()))


def gradcheck_actor(rng: np.random.Generator) -> float:
    obs, act, hidden, k, n = _small_dims(rng)
    critic = CriticEnsemble.create(obs, act, k, hidden, rng)
    actor = ActorNet.create(obs, act, k, hidden, rng)
    s = rng.normal(size=(n, obs))
    noise = rng.normal(size=(k, n, act))
    alpha = float(rng.uniform(0.0, 1.0))

    def loss() -> float:
        return actor_loss_grad(actor, critic, s, alpha, noise=noise).loss

    res = actor_loss_grad(actor, critic, s, alpha, noise=noise)
    return relative_error(res.arrays(), central_difference(loss, actor.arrays()))


def gradcheck_bootdqnp(rng: np.random.Generator) -> float:
    obs, act, hidden, k, n = _small_dims(rng)
    ens = CriticEnsemble.create(obs, act, k, hidden, rng, gamma=float(rng.uniform(0.3, 0.99)))
    priors = PriorFunction.create(obs, act, k, hidden, rng, beta=float(rng.uniform(0.0, 5.0)))
    batch = random_batch(rng, n, obs, act)
    mask = draw_mask(n, k, 0.2, rng)
    nxt = rng.uniform(-1.0, 1.0, size=(n, act))

    prior_now, prior_next = priors.values(batch.s, batch.a), priors.values(batch.s_next, nxt)
    target_values = ensemble_values(ens, batch.s_next, nxt, use_targets=True)

    def loss() -> float:
        values = ensemble_values(ens, batch.s, batch.a)
        return bootdqnp_objective(
            values, target_values, prior_now, prior_next, batch.r, batch.done, mask.bits, ens.gamma
        )[0]

    _, grads = bootdqnp_loss_grad(ens, priors, batch, mask, nxt)
    return relative_error(grads.arrays(), central_difference(loss, ens.member_arrays()))


def limit_reduction_gap(rng: np.random.Generator) -> float:
    """Huge prior variance, no propagation: PBAC critic loss vs masked per-member TD loss."""
    n, k = int(rng.integers(2, 33)), int(rng.integers(2, 11))
    values, targets = rng.normal(size=(n, k)), rng.normal(size=(n, k))
    r, done = rng.normal(size=n), (rng.random(n) < 0.2).astype(np.float64)
    mask = draw_mask(n, k, 0.05, rng).bits
    gamma = float(rng.uniform(0.1, 0.99))
    pbac, _ = pbac_objective(values, targets, r, done, mask, None, 0.0, gamma, 1e12, ("diversity", "coherence"))
    zeros = np.zeros((n, k))
    td, _ = bootdqnp_objective(values, targets, zeros, zeros, r, done, mask, gamma)
    return abs(pbac.total - td)


def run_numeric_checks(seed: int = 0, n_configs: int = 100) -> OracleReport:
    rng = np.random.default_rng(seed)
    report = OracleReport()
    started = time.perf_counter()

    ex = hand_example()
    breakdown, _ = pbac_objective(
        ex["values"], ex["target_values"], ex["r"], ex["done"], ex["mask"], None, 0.0, ex["gamma"], ex["sigma0_sq"]
    )
    kl = kl_from_values(ex["values"], ex["target_values"], ex["r"], ex["done"], ex["gamma"], ex["sigma0_sq"])
    for name, got, want in (
        ("hand value: diversity", breakdown.diversity, HAND_DIVERSITY),
        ("hand value: coherence", breakdown.coherence, HAND_COHERENCE),
        ("hand value: propagation", breakdown.propagation, HAND_PROPAGATION),
        ("hand value: total", breakdown.total, HAND_DIVERSITY + HAND_COHERENCE + HAND_PROPAGATION),
        ("hand value: kl", kl, HAND_KL),
    ):
        report.outcome(name).record(abs(got - want) <= HAND_TOL, abs(got - want) - HAND_TOL)

    for gamma in (0.0, 0.5, 0.99):
        gap = abs(propagation_coefficient(gamma) - (gamma * gamma + 0.5))
        report.outcome("propagation coefficient identity").record(gap <= 1e-15, gap - 1e-15)

    rhs = make_diagnostics(2.0, 0.0, 0.0, 0.5, 256, nu=1.0, lambda_bar=3.0, delta=0.05, reward_bound=1.0).rhs
    report.outcome("bound arithmetic").record(abs(rhs - BOUND_EXAMPLE_RHS) <= 1e-6, abs(rhs - BOUND_EXAMPLE_RHS) - 1e-6)

    for kappa in (0.01, 0.05):
        rate = float(draw_mask(1000, 1000, kappa, rng).bits.mean())
        gap = abs(rate - (1.0 - kappa))
        report.outcome("mask keep rate").record(gap <= 1e-3, gap - 1e-3)
    a, b = draw_mask(256, 10, 0.05, rng), draw_mask(256, 10, 0.05, rng)
    report.outcome("fresh mask per draw").record(a.digest() != b.digest(), 0.0 if a.digest() != b.digest() else 1.0)

    for _ in range(n_configs):
        for name, fn in (
            ("gradcheck mlp", gradcheck_mlp),
            ("gradcheck critic loss", gradcheck_pbac),
            ("gradcheck actor loss", gradcheck_actor),
            ("gradcheck prior-perturbed TD loss", gradcheck_bootdqnp),
        ):
            err = fn(rng)
            report.outcome(name).record(err < GRAD_TOL, err - GRAD_TOL)
        gap = limit_reduction_gap(rng)
        report.outcome("limit reduction to per-member TD").record(gap <= HAND_TOL, gap - HAND_TOL)

    report.seconds = time.perf_counter() - started
    return report

