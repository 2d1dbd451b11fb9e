from src.oracle.lemmas import Check, contraction_check, lemma1_checks, lemma4_theorem_check, ltilde_exact
from src.oracle.mdp import FiniteMdp, identical_rows_mdp, q_pi_exact, random_mdp, stationary_dist, swap_chain
from src.oracle.suite import OracleReport, run_oracle_suite

__all__ = [
    "Check",
    "FiniteMdp",
    "OracleReport",
    "contraction_check",
    "identical_rows_mdp",
    "lemma1_checks",
    "lemma4_theorem_check",
    "ltilde_exact",
    "q_pi_exact",
    "random_mdp",
    "run_oracle_suite",
    "stationary_dist",
    "swap_chain",
]
