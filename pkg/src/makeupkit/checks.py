"""Named gradient-check suites for every kernel with a hand-written VJP.

Each suite builds seeded random instances, runs :func:`makeupkit.core.gradcheck`
against the analytic VJP, and returns labeled reports. The ``gradcheck`` CLI
subcommand and the acceptance tests both run these.
"""

import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from .attention import (
    AttentionParams,
    cross_attention,
    cross_attention_vjp,
    sow_attention,
    sow_attention_vjp,
)
from .core import DiffOp, GradCheckReport, gradcheck, softmax_rows, softmax_rows_vjp
from .errors import ConfigurationError
from .geometry import LandmarkSet, bilinear_sample, bilinear_sample_vjp_image

Suite = Callable[[float, int], List[Tuple[str, GradCheckReport]]]


def _landmarks(rng, n, width, height) -> LandmarkSet:
    pts = np.stack(
        [rng.uniform(0.3, width - 0.3, n), rng.uniform(0.3, height - 0.3, n)], axis=1
    )
    return LandmarkSet(pts, width, height)


def check_softmax_rows(tol: float, instances: int = 3):
    out = []
    for i in range(instances):
        rng = np.random.default_rng(100 + i)
        x = rng.normal(size=(4, 6))
        cot = rng.normal(size=(4, 6))
        op = DiffOp(
            forward=softmax_rows,
            vjp=lambda a, c: softmax_rows_vjp(softmax_rows(a), c),
        )
        out.append((f"softmax_rows[{i}]", gradcheck(op, x, cot, tol)))
    return out


def check_matmul(tol: float, instances: int = 3):
    out = []
    for i in range(instances):
        rng = np.random.default_rng(200 + i)
        b = rng.normal(size=(3, 3))
        a = rng.normal(size=(3, 3))
        cot = rng.normal(size=(3, 3))
        op = DiffOp(forward=lambda x: x @ b, vjp=lambda x, c: c @ b.T)
        out.append((f"matmul[{i}]", gradcheck(op, a, cot, tol)))
    return out


def check_bilinear_sample(tol: float, instances: int = 3):
    out = []
    for i in range(instances):
        rng = np.random.default_rng(300 + i)
        image = rng.normal(size=(5, 6, 2))
        grid = np.stack(
            [rng.uniform(0.2, 4.8, (4, 4)), rng.uniform(0.2, 3.8, (4, 4))], axis=-1
        )
        op = DiffOp(
            forward=lambda img: bilinear_sample(img, grid),
            vjp=lambda img, c: bilinear_sample_vjp_image(img.shape, grid, c),
        )
        cot = rng.normal(size=(4, 4, 2))
        out.append((f"bilinear_sample[{i}]", gradcheck(op, image, cot, tol)))
    return out


def _cross_setup(i: int):
    rng = np.random.default_rng(400 + i)
    h = w = 3
    c = 2
    n = 4
    x = rng.normal(size=(h, w, c))
    y = rng.normal(size=(h, w, c))
    x_lm = _landmarks(rng, n, w, h)
    y_lm = _landmarks(rng, n, w, h)
    params = AttentionParams.random(c, 2 * n, seed=400 + i, scale=0.3)
    cot = rng.normal(size=(h, w, c))
    return x, y, x_lm, y_lm, params, cot


def check_cross_attention(tol: float, instances: int = 3):
    out = []
    for i in range(instances):
        x, y, x_lm, y_lm, params, cot = _cross_setup(i)

        def vjp_key(key):
            return lambda _v, c: cross_attention_vjp(x, y, x_lm, y_lm, params, c)[key]

        op_x = DiffOp(
            forward=lambda v: cross_attention(v, y, x_lm, y_lm, params),
            vjp=vjp_key("x_feat"),
        )
        op_y = DiffOp(
            forward=lambda v: cross_attention(x, v, x_lm, y_lm, params),
            vjp=vjp_key("y_feat"),
        )
        out.append((f"cross_attention/x_feat[{i}]", gradcheck(op_x, x, cot, tol)))
        out.append((f"cross_attention/y_feat[{i}]", gradcheck(op_y, y, cot, tol)))
        for key in ("q", "k", "v"):
            def fwd(mat, _key=key):
                kw = {"q": params.q, "k": params.k, "v": params.v}
                kw[_key] = mat
                return cross_attention(x, y, x_lm, y_lm, AttentionParams(**kw))

            def vjp(mat, c, _key=key):
                kw = {"q": params.q, "k": params.k, "v": params.v}
                kw[_key] = mat
                return cross_attention_vjp(x, y, x_lm, y_lm, AttentionParams(**kw), c)[_key]

            start = {"q": params.q, "k": params.k, "v": params.v}[key]
            out.append(
                (f"cross_attention/{key}[{i}]", gradcheck(DiffOp(fwd, vjp), start, cot, tol))
            )
    return out


def check_sow_attention(tol: float, instances: int = 3, size: int = 8, window: int = 4):
    out = []
    for i in range(instances):
        rng = np.random.default_rng(500 + i)
        c = 2
        n = 5
        x = rng.normal(size=(size, size, c))
        y = rng.normal(size=(size, size, c))
        x_lm = _landmarks(rng, n, size, size)
        y_lm = _landmarks(rng, n, size, size)
        params = AttentionParams.random(c, 2 * n, seed=500 + i, scale=0.3)
        cot = rng.normal(size=(size, size, c))

        def vjp_key(key):
            return lambda _v, cc: sow_attention_vjp(x, y, x_lm, y_lm, window, params, cc)[key]

        op_x = DiffOp(
            forward=lambda v: sow_attention(v, y, x_lm, y_lm, window, params),
            vjp=vjp_key("x_feat"),
        )
        op_y = DiffOp(
            forward=lambda v: sow_attention(x, v, x_lm, y_lm, window, params),
            vjp=vjp_key("y_feat"),
        )
        out.append((f"sow_attention/x_feat[{i}]", gradcheck(op_x, x, cot, tol)))
        out.append((f"sow_attention/y_feat[{i}]", gradcheck(op_y, y, cot, tol)))
    return out


REGISTRY: Dict[str, Tuple[Suite, float]] = {
    # name -> (suite, default tolerance)
    "softmax_rows": (check_softmax_rows, 1e-4),
    "matmul": (check_matmul, 1e-6),
    "bilinear_sample": (check_bilinear_sample, 1e-4),
    "cross_attention": (check_cross_attention, 1e-4),
    "sow_attention": (check_sow_attention, 1e-4),
}


def run_suite(kernel: str, tol: float = None) -> List[Tuple[str, GradCheckReport]]:
    if kernel not in REGISTRY:
        raise ConfigurationError(
            f"unknown kernel {kernel!r}; choose from {', '.join(sorted(REGISTRY))}"
        )
    suite, default_tol = REGISTRY[kernel]
    return suite(tol if tol is not None else default_tol)
