"""Numeric foundation: checked matmul, stable row softmax, and a
finite-difference gradient-check harness used by every differentiable kernel.

All arrays are float64. Kernels that need gradients implement their
vector-Jacobian products by hand; :func:`gradcheck` compares them against
central finite differences.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionError, MissingVjpError


def as_f64(a) -> np.ndarray:
    return np.asarray(a, dtype=np.float64)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit inner-extent check."""
    a = as_f64(a)
    b = as_f64(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"matmul expects 2-D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"inner extents differ: {a.shape} x {b.shape}")
    return a @ b


def softmax_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise softmax with per-row max subtraction for overflow safety."""
    a = as_f64(a)
    shifted = a - a.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_rows_vjp(softmax_out: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
    """VJP of softmax_rows given its forward output."""
    s = softmax_out
    inner = (cotangent * s).sum(axis=-1, keepdims=True)
    return s * (cotangent - inner)


@dataclass(frozen=True)
class GradCheckReport:
    max_abs_err: float
    max_rel_err: float
    num_entries_checked: int
    passed: bool


@dataclass(frozen=True)
class DiffOp:
    """A differentiable operation handle: forward plus optional VJP.

    ``forward(x) -> y`` and ``vjp(x, cotangent_of_y) -> cotangent_of_x``.
    """

    forward: Callable[[np.ndarray], np.ndarray]
    vjp: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None


def gradcheck(
    op: DiffOp,
    x: np.ndarray,
    cotangent: np.ndarray,
    tol: float,
    step: float = 1e-5,
) -> GradCheckReport:
    """Compare the analytic VJP of ``op`` against central finite differences.

    The scalar being differentiated is ``<cotangent, op.forward(x)>``; its
    gradient w.r.t. every entry of ``x`` is estimated with a symmetric
    two-point stencil. Relative error is measured against the largest
    gradient magnitude so near-zero entries do not dominate.
    """
    if op.vjp is None:
        raise MissingVjpError("operation does not provide a VJP")
    x = as_f64(x)
    cot = as_f64(cotangent)
    analytic = as_f64(op.vjp(x, cot))
    if analytic.shape != x.shape:
        raise DimensionError(f"VJP shape {analytic.shape} != input shape {x.shape}")

    numeric = np.empty_like(x)
    flat = x.reshape(-1)
    num_flat = numeric.reshape(-1)
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + step
        up = float(np.sum(cot * op.forward(x)))
        flat[idx] = orig - step
        down = float(np.sum(cot * op.forward(x)))
        flat[idx] = orig
        num_flat[idx] = (up - down) / (2.0 * step)

    abs_err = np.abs(analytic - numeric)
    scale = max(float(np.abs(numeric).max(initial=0.0)), float(np.abs(analytic).max(initial=0.0)), 1e-12)
    max_abs = float(abs_err.max(initial=0.0))
    max_rel = max_abs / scale
    return GradCheckReport(
        max_abs_err=max_abs,
        max_rel_err=max_rel,
        num_entries_checked=int(flat.size),
        passed=bool(max_rel <= tol),
    )
