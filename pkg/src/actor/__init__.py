from src.actor.entropy import EntropyTuner, alpha_update
from src.actor.loss import ActorLossResult, actor_loss, actor_loss_grad
from src.actor.network import ActorNet, SquashedSample, sample_action
from src.actor.selector import BehaviorSelector, select_head

__all__ = [
    "ActorLossResult",
    "ActorNet",
    "BehaviorSelector",
    "EntropyTuner",
    "SquashedSample",
    "actor_loss",
    "actor_loss_grad",
    "alpha_update",
    "sample_action",
    "select_head",
]
