"""Q-learning ring builder: MDP environment, embedding/Q network, training."""

from .env import (
    EpisodeState,
    GreedyResult,
    RingEpisode,
    greedy_construct,
    legal_actions,
    step_reward,
)
from .network import embed_state, q_score
from .params import CheckpointFormatError, EmbedParams, QModel, load_model, save_model
from .replay import ReplayBuffer, Transition
from .train import (
    TrainConfig,
    TrainingDiverged,
    TrainLog,
    TrainResult,
    epsilon_schedule,
    train,
)

__all__ = [
    "EpisodeState",
    "GreedyResult",
    "RingEpisode",
    "greedy_construct",
    "legal_actions",
    "step_reward",
    "embed_state",
    "q_score",
    "CheckpointFormatError",
    "EmbedParams",
    "QModel",
    "load_model",
    "save_model",
    "ReplayBuffer",
    "Transition",
    "TrainConfig",
    "TrainingDiverged",
    "TrainLog",
    "TrainResult",
    "epsilon_schedule",
    "train",
]
