"""Training objective: adversarial, cycle-consistency, perceptual, and
makeup (pseudo-ground-truth) losses with their weighted combination.

All reductions are means over entries so magnitudes are resolution
independent. Adversarial terms expect post-sigmoid scores in (0, 1) and
average over patch-score maps.
"""

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .core import as_f64
from .errors import ContractViolationError, DimensionError


@dataclass(frozen=True)
class LossWeights:
    adv: float = 1.0
    cyc: float = 10.0
    per: float = 0.005
    make: float = 1.0

    def __post_init__(self):
        for name in ("adv", "cyc", "per", "make"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ContractViolationError(f"weight {name} must be finite and >= 0")


class FeatureExtractor(Protocol):
    def features(self, image: np.ndarray) -> np.ndarray: ...


def _check_scores(scores: np.ndarray) -> np.ndarray:
    s = as_f64(scores)
    if np.any(s <= 0.0) or np.any(s >= 1.0):
        raise ContractViolationError("scores must lie strictly inside (0, 1)")
    return s


def adv_loss_g(dx_scores: np.ndarray, dy_scores: np.ndarray) -> float:
    """Generator adversarial loss: mean negative log-score, both directions."""
    dx = _check_scores(dx_scores)
    dy = _check_scores(dy_scores)
    return float(-np.mean(np.log(dx)) - np.mean(np.log(dy)))


def adv_loss_d(
    real_x: np.ndarray,
    real_y: np.ndarray,
    fake_x: np.ndarray,
    fake_y: np.ndarray,
) -> float:
    """Discriminator adversarial loss over real and generated scores."""
    rx, ry = _check_scores(real_x), _check_scores(real_y)
    fx, fy = _check_scores(fake_x), _check_scores(fake_y)
    return float(
        -np.mean(np.log(rx))
        - np.mean(np.log(ry))
        - np.mean(np.log(1.0 - fx))
        - np.mean(np.log(1.0 - fy))
    )


def _check_same(a, b):
    a, b = as_f64(a), as_f64(b)
    if a.shape != b.shape:
        raise DimensionError(f"shapes differ: {a.shape} vs {b.shape}")
    return a, b


def cycle_loss(x, y, x_rec, y_rec) -> float:
    """Mean L1 distance between originals and their reconstructions."""
    x, x_rec = _check_same(x, x_rec)
    y, y_rec = _check_same(y, y_rec)
    return float(np.mean(np.abs(x_rec - x)) + np.mean(np.abs(y_rec - y)))


def perceptual_loss(a, b, extractor: FeatureExtractor) -> float:
    """2-norm distance between extracted feature tensors."""
    fa = as_f64(extractor.features(np.asarray(a)))
    fb = as_f64(extractor.features(np.asarray(b)))
    if fa.shape != fb.shape:
        raise DimensionError("extractor returned mismatched feature shapes")
    return float(np.linalg.norm((fa - fb).ravel()))


def makeup_loss(gen_xy, pgt_xy, gen_yx, pgt_yx) -> float:
    """Mean L1 distance to the pseudo ground truth, both directions."""
    gxy, pxy = _check_same(gen_xy, pgt_xy)
    gyx, pyx = _check_same(gen_yx, pgt_yx)
    return float(np.mean(np.abs(gxy - pxy)) + np.mean(np.abs(gyx - pyx)))


@dataclass(frozen=True)
class LossParts:
    adv_g: float
    adv_d: float
    cyc: float
    per: float
    make: float


def total_loss(parts: LossParts, weights: LossWeights) -> tuple:
    """Weighted totals ``(L_G, L_D)``.

    Uses a correctly rounded sum so the default-weight unit-part case is
    bit-exact.
    """
    for name in ("adv_g", "adv_d", "cyc", "per", "make"):
        if not math.isfinite(getattr(parts, name)):
            raise ContractViolationError(f"loss part {name} is not finite")
    l_g = math.fsum(
        [
            weights.adv * parts.adv_g,
            weights.cyc * parts.cyc,
            weights.per * parts.per,
            weights.make * parts.make,
        ]
    )
    l_d = weights.adv * parts.adv_d
    return l_g, l_d
