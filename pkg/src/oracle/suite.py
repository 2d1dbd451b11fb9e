from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from src.core.logger import get_logger
from src.oracle.lemmas import contraction_check, lemma1_checks, lemma4_theorem_check
from src.oracle.mdp import FiniteMdp, bellman, identical_rows_mdp, q_pi_exact, random_mdp, swap_chain

logger = get_logger(__name__)

GAMMAS: tuple[float, ...] = (0.5, 0.9, 0.99)
MAX_STATES = 8
FIXED_POINT_TOL = 1e-10


@dataclass
class CheckOutcome:
    name: str
    cases: int = 0
    failures: int = 0
    worst: float = float("-inf")  # largest (lhs - rhs) - tol seen; <= 0 means every case passed

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.failures == 0

    def record(self, ok: bool, margin: float) -> None:
        self.cases += 1
        self.failures += 0 if ok else 1
        self.worst = max(self.worst, margin)


@dataclass
class OracleReport:
    outcomes: dict[str, CheckOutcome] = field(default_factory=dict)
    seconds: float = 0.0

    def outcome(self, name: str) -> CheckOutcome:
        return self.outcomes.setdefault(name, CheckOutcome(name))

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes.values())


def random_ensemble(rng: np.random.Generator, m: FiniteMdp, k: int = 3) -> list[np.ndarray]:
    q = q_pi_exact(m)
    spread = 1.0 / (1.0 - m.gamma)
    return [q + rng.normal(0.0, 0.1 * spread, size=m.n_states) for _ in range(k)]


def _margin(check) -> float:
    if check.kind == "eq":
        return abs(check.diff) - check.tol
    return check.diff - check.tol


def run_oracle_suite(seed: int = 0, n_mdps: int = 200, n_iid: int = 50) -> OracleReport:
    rng = np.random.default_rng(seed)
    report = OracleReport()
    started = time.perf_counter()

    for i in range(n_mdps):
        gamma = GAMMAS[i % len(GAMMAS)]
        m = random_mdp(rng, int(rng.integers(2, MAX_STATES + 1)), gamma)
        ens = random_ensemble(rng, m)

        q = q_pi_exact(m)
        residual = float(np.abs(bellman(m, q) - q).max())
        report.outcome("q_pi fixed point").record(residual < FIXED_POINT_TOL, residual - FIXED_POINT_TOL)

        general = lemma1_checks(m, ens).general
        report.outcome("lemma1 general identity").record(general.passed, _margin(general))

        q1, q2 = random_ensemble(rng, m, k=2)
        contraction = contraction_check(m, q1, q2)
        report.outcome("contraction").record(contraction.passed, _margin(contraction))

        l4 = lemma4_theorem_check(m, ens)
        worst = max(_margin(c) for c in (*l4.members, l4.squared, l4.chain))
        report.outcome("lemma4 and theorem chain").record(l4.passed, worst)

    for i in range(n_iid):
        m = identical_rows_mdp(rng, int(rng.integers(2, MAX_STATES + 1)), GAMMAS[i % len(GAMMAS)])
        iid = lemma1_checks(m, random_ensemble(rng, m)).iid
        report.outcome("lemma1 iid form on identical rows").record(iid.passed, _margin(iid))

    # the marginal-variance form needs i.i.d. next states; a deterministic swap must break it
    swap = swap_chain(0.9)
    broken = lemma1_checks(swap, [np.array([0.0, 1.0]), np.array([2.0, -1.0])]).iid
    report.outcome("lemma1 iid form fails on swap chain (expected)").record(not broken.passed, -abs(broken.diff))

    report.seconds = time.perf_counter() - started
    for o in report.outcomes.values():
        logger.info("%s %s: %d cases, %d failures", "PASS" if o.passed else "FAIL", o.name, o.cases, o.failures)
    return report
