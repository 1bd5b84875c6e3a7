from .noise import (
    NoiseRealization,
    project_blocks,
    classical_saturator,
    mix_alpha,
    observe,
)
from .probability import (
    DetectionConfig,
    DetectionEstimate,
    Heatmap,
    detect,
    witness_sigma,
    p_det_closed,
    alpha_half_maximum,
    p_det_mc,
    detection_curve,
    heatmap,
)
