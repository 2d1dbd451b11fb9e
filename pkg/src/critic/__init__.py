from src.critic.bootdqn import PriorFunction, bootdqnp_loss_grad, bootdqnp_objective
from src.critic.ensemble import CriticEnsemble, ensemble_values, update_targets
from src.critic.pbac_loss import (
    VAR_FLOOR,
    CriticLossBreakdown,
    PosteriorMoments,
    PriorConfig,
    kl_term,
    masked_moments,
    pbac_loss,
    pbac_loss_grad,
    pbac_objective,
)
from src.critic.soft_td import min_target_loss_grad, min_target_objective

__all__ = [
    "VAR_FLOOR",
    "CriticEnsemble",
    "CriticLossBreakdown",
    "PosteriorMoments",
    "PriorConfig",
    "PriorFunction",
    "bootdqnp_loss_grad",
    "bootdqnp_objective",
    "ensemble_values",
    "kl_term",
    "masked_moments",
    "min_target_loss_grad",
    "min_target_objective",
    "pbac_loss",
    "pbac_loss_grad",
    "pbac_objective",
    "update_targets",
]
