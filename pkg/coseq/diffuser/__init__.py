from .schedule import NoiseSchedule, forward_noise
from .model import DiffuserModel, Denoiser, save_diffuser, load_diffuser, to_image_space, to_model_space
from .sampling import Latent, GenerationRequest, generate, generate_many, candidate_latents
from .training import DiffuserTrainingResult, caption_conditions, train_diffuser
from .latent_io import save_latents, load_latents

__all__ = [
    "NoiseSchedule",
    "forward_noise",
    "DiffuserModel",
    "Denoiser",
    "save_diffuser",
    "load_diffuser",
    "to_image_space",
    "to_model_space",
    "Latent",
    "GenerationRequest",
    "generate",
    "generate_many",
    "candidate_latents",
    "DiffuserTrainingResult",
    "caption_conditions",
    "train_diffuser",
    "save_latents",
    "load_latents",
]
