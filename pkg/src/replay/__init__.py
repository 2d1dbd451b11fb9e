from src.replay.buffer import Minibatch, ReplayBuffer, Transition
from src.replay.masks import BootstrapMask, draw_mask

__all__ = ["BootstrapMask", "Minibatch", "ReplayBuffer", "Transition", "draw_mask"]
