"""Software pulse-radar baseband chain for displacement and vibration
monitoring: fixed-point range compression, interferometric slow-time
analysis, and a streaming service for the operator console."""

from .config import ConfigError, SystemConfig, load_config
from .constants import SPEED_OF_LIGHT_M_S
from .pipeline import CommandError, Pipeline, PulseResult
from .scene import (
    ChannelSpec,
    LinearRamp,
    PulsePair,
    Scene,
    SceneError,
    SceneRenderer,
    Sinusoid,
    Static,
    StepSchedule,
    TargetSpec,
    delay_of,
    load_scene,
)
from .slowtime import (
    BinSeries,
    DisplacementTrace,
    DisplacementTracker,
    VibrationSpectrum,
    Waterfall,
    displacement,
    mean_displacement,
    peak_to_peak,
    unwrap_phase,
    vibration_spectrum,
)
from .waveform import ChirpParams, IqBuffer, dequantize, quantize, synthesize_chirp
from .xcorr import (
    DcEstimate,
    EngineConfig,
    RangeProfile,
    compress,
    cross_correlate,
    dc_estimate,
    magnitude,
    peak_bin,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "ChirpParams",
    "CommandError",
    "ConfigError",
    "BinSeries",
    "DcEstimate",
    "DisplacementTrace",
    "DisplacementTracker",
    "EngineConfig",
    "IqBuffer",
    "LinearRamp",
    "Pipeline",
    "PulsePair",
    "PulseResult",
    "RangeProfile",
    "SPEED_OF_LIGHT_M_S",
    "Scene",
    "SceneError",
    "SceneRenderer",
    "Sinusoid",
    "Static",
    "StepSchedule",
    "SystemConfig",
    "TargetSpec",
    "VibrationSpectrum",
    "Waterfall",
    "compress",
    "cross_correlate",
    "dc_estimate",
    "delay_of",
    "dequantize",
    "displacement",
    "load_config",
    "load_scene",
    "magnitude",
    "mean_displacement",
    "peak_bin",
    "peak_to_peak",
    "quantize",
    "synthesize_chirp",
    "unwrap_phase",
    "vibration_spectrum",
]
