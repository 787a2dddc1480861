"""seldkit: spatial features, augmentation, simulation and metrics for SELD."""

from .augment import (
    MaskSpec,
    SwapTransform,
    apply_mask,
    apply_swap_audio,
    apply_swap_labels,
    derive_swap_table,
    freq_shift,
)
from .covariance import (
    EigPair,
    ScmField,
    coherence,
    estimate_scm,
    principal_eigenvector,
)
from .dsp import (
    ComplexSpectrogram,
    MelFilterbank,
    MultichannelAudio,
    StftConfig,
    apply_mel,
    log_power,
    make_mel_filterbank,
    stft,
)
from .features import (
    AxisMeta,
    ChannelRole,
    FeatureConfig,
    FeatureKind,
    FeatureScaler,
    FeatureTensor,
    build_feature,
    compute_epv,
    compute_gcc_phat,
    compute_ipd,
    compute_nipd,
    fit_scaler,
)
from .fileio import (
    AnnotationFormatError,
    FeatureFileError,
    WavFormatError,
    read_annotations,
    read_feature,
    read_wav,
    write_annotations,
    write_feature,
    write_wav,
)
from .geometry import (
    SPEED_OF_SOUND,
    ArrayGeometry,
    rdoa,
    steering_vector,
    tetrahedral_array,
    unit_direction,
)
from .metrics import (
    MetricsReport,
    SeldEvent,
    SeldEventGrid,
    angular_distance,
    evaluate,
    seld_error,
)
from .simulate import SceneSpec, SourceSpec, fractional_delay, load_scene, synthesize

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "AxisMeta",
    "AnnotationFormatError",
    "ChannelRole",
    "ComplexSpectrogram",
    "EigPair",
    "FeatureConfig",
    "FeatureFileError",
    "FeatureKind",
    "FeatureScaler",
    "FeatureTensor",
    "MaskSpec",
    "MelFilterbank",
    "MetricsReport",
    "MultichannelAudio",
    "SPEED_OF_SOUND",
    "SceneSpec",
    "ScmField",
    "SeldEvent",
    "SeldEventGrid",
    "SourceSpec",
    "StftConfig",
    "SwapTransform",
    "WavFormatError",
    "angular_distance",
    "apply_mask",
    "apply_mel",
    "apply_swap_audio",
    "apply_swap_labels",
    "build_feature",
    "coherence",
    "compute_epv",
    "compute_gcc_phat",
    "compute_ipd",
    "compute_nipd",
    "derive_swap_table",
    "estimate_scm",
    "evaluate",
    "fit_scaler",
    "fractional_delay",
    "freq_shift",
    "load_scene",
    "log_power",
    "make_mel_filterbank",
    "principal_eigenvector",
    "rdoa",
    "read_annotations",
    "read_feature",
    "read_wav",
    "seld_error",
    "steering_vector",
    "stft",
    "synthesize",
    "tetrahedral_array",
    "unit_direction",
    "write_annotations",
    "write_feature",
    "write_wav",
]
