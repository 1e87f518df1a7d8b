"""NV-centre creation in CVD diamond: process model, spectral analysis and inverse design."""

from .errors import ModelError, NVForgeError, ValidationError
from .model import ProcessModel, default_model, predict
from .state import ConversionRatios, IrradiationPlan, MaterialState, Stage

__version__ = "0.1.0"

__all__ = [
    "ConversionRatios",
    "IrradiationPlan",
    "MaterialState",
    "ModelError",
    "NVForgeError",
    "ProcessModel",
    "Stage",
    "ValidationError",
    "default_model",
    "predict",
]
