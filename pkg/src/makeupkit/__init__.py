"""Makeup-transfer building blocks at desk scale.

Subpackages cover the numeric foundation (:mod:`makeupkit.core`), TPS
warping and sampling (:mod:`makeupkit.geometry`), full and windowed
cross-attention (:mod:`makeupkit.attention`), pseudo-ground-truth synthesis
(:mod:`makeupkit.pgt`), the makeup feature-map editing algebra
(:mod:`makeupkit.algebra`), the toy generator/discriminator forwards
(:mod:`makeupkit.network`), and the loss stack (:mod:`makeupkit.losses`).
"""

from .algebra import (
    EditEntry,
    EditSpec,
    MakeupFeatureMap,
    apply_makeup,
    downsample_mask,
    interpolate,
    local_edit,
    partial_transfer,
)
from .attention import (
    AttentionParams,
    attention_cost,
    cross_attention,
    cross_attention_vjp,
    sow_attention,
    sow_attention_vjp,
    sow_weight,
)
from .core import DiffOp, GradCheckReport, gradcheck, matmul, softmax_rows
from .errors import MakeupkitError
from .geometry import (
    LandmarkSet,
    TpsTransform,
    bilinear_sample,
    embed_map,
    embed_point,
    load_landmarks,
    make_grid,
    tps_apply,
    tps_solve,
)
from .losses import LossParts, LossWeights, total_loss
from .network import GeneratorConfig, generator_forward
from .pgt import BlendSchedule, RegionMasks, histogram_match, make_pgt, schedule_eval

__version__ = "0.1.0"
