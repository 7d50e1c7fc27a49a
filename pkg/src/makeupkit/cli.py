"""Command-line interface.

Subcommands: warp, histmatch, pgt, attn-bench, edit, gradcheck. Every
failure path exits with code 2 and a single ``error: ...`` line on stderr.
"""

import functools
import json
import sys
import time

import click
import numpy as np

from . import attention
from .algebra import EditEntry, EditSpec, MakeupFeatureMap, downsample_mask, local_edit
from .attention import attention_cost, cross_attention, macs, reset_macs, sow_attention
from .checks import run_suite
from .errors import MakeupkitError
from .geometry import LandmarkSet, load_landmarks, make_grid, tps_solve, bilinear_sample
from .io_utils import load_image, load_mask, mask_dir_paths, save_image
from .losses import LossWeights
from .network import (
    GeneratorConfig,
    faenc_forward,
    from_unit_range,
    init_generator_weights,
    madec_forward,
    mtm_forward,
    to_unit_range,
)
from .pgt import REGIONS, BlendSchedule, RegionMasks, make_pgt, schedule_eval


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MakeupkitError as exc:
            _fail(str(exc))
        except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
            _fail(f"{type(exc).__name__}: {exc}")

    return wrapper


@click.group()
def main():
    """Makeup-transfer toolbox: warping, PGT synthesis, windowed attention."""


@main.command()
@click.option("--src-landmarks", required=True, type=click.Path())
@click.option("--ref-landmarks", required=True, type=click.Path())
@click.option("--ref-image", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@guarded
def warp(src_landmarks, ref_landmarks, ref_image, out):
    """Warp the reference image into the source geometry via TPS."""
    ref = load_image(ref_image)
    h, w = ref.shape[:2]
    src_lm = load_landmarks(src_landmarks, w, h)
    ref_lm = load_landmarks(ref_landmarks, w, h)
    transform = tps_solve(src_lm, ref_lm)
    grid = make_grid(transform, h, w)
    warped = bilinear_sample(ref.astype(np.float64), grid)
    save_image(out, np.clip(np.rint(warped), 0, 255).astype(np.uint8))


def _load_pair(src, ref, masks_src, masks_ref):
    x = load_image(src)
    y = load_image(ref)
    mx = {name: load_mask(path) for name, path in mask_dir_paths(masks_src).items()}
    my = {name: load_mask(path) for name, path in mask_dir_paths(masks_ref).items()}
    return x, y, RegionMasks(**mx), RegionMasks(**my)


@main.command()
@click.option("--src", required=True, type=click.Path())
@click.option("--ref", required=True, type=click.Path())
@click.option("--masks-src", required=True, type=click.Path())
@click.option("--masks-ref", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@guarded
def histmatch(src, ref, masks_src, masks_ref, out):
    """Per-region histogram-matching composite (the alpha=0 PGT)."""
    from .pgt import histogram_match

    x, y, masks_x, masks_y = _load_pair(src, ref, masks_src, masks_ref)
    result = x.copy()
    for region in REGIONS:
        matched = histogram_match(x, y, masks_x.get(region), masks_y.get(region))
        sel = masks_x.get(region) > 0.5
        result[sel] = matched[sel]
    save_image(out, result)


def _parse_alphas(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.BadParameter("--alphas needs three values: skin,lip,eyeshadow")
    return dict(zip(("skin", "lip", "eyeshadow"), (float(p) for p in parts)))


@main.command()
@click.option("--src", required=True, type=click.Path())
@click.option("--ref", required=True, type=click.Path())
@click.option("--masks-src", required=True, type=click.Path())
@click.option("--masks-ref", required=True, type=click.Path())
@click.option("--landmarks-src", required=True, type=click.Path())
@click.option("--landmarks-ref", required=True, type=click.Path())
@click.option("--alphas", default=None, help="skin,lip,eyeshadow blend factors in [0,1]")
@click.option("--progress", default=None, type=float, help="training progress in [0,1]")
@click.option("--schedule", default=None, type=click.Path(), help="JSON breakpoint config")
@click.option("--out", required=True, type=click.Path())
@guarded
def pgt(src, ref, masks_src, masks_ref, landmarks_src, landmarks_ref, alphas, progress, schedule, out):
    """Synthesize the pseudo ground truth image."""
    if (alphas is None) == (progress is None):
        _fail("provide exactly one of --alphas or --progress")
    x, y, masks_x, masks_y = _load_pair(src, ref, masks_src, masks_ref)
    h, w = x.shape[:2]
    x_lm = load_landmarks(landmarks_src, w, h)
    y_lm = load_landmarks(landmarks_ref, w, h)
    if alphas is not None:
        alpha_map = _parse_alphas(alphas)
    else:
        sched = BlendSchedule.from_json(schedule) if schedule else BlendSchedule()
        alpha_map = schedule_eval(sched, progress)
    save_image(out, make_pgt(x, y, masks_x, masks_y, x_lm, y_lm, alpha_map))


def _bench_landmarks(n: int, width: int, height: int) -> LandmarkSet:
    angles = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack(
        [
            width / 2 + (width * 0.35) * np.cos(angles),
            height / 2 + (height * 0.35) * np.sin(angles),
        ],
        axis=1,
    )
    return LandmarkSet(pts, width, height)


@main.command(name="attn-bench")
@click.option("--height", default=64, type=int)
@click.option("--width", default=64, type=int)
@click.option("--channels", default=64, type=int)
@click.option("--window", default=8, type=int, help="sow window size")
@click.option("--full/--no-full", "run_full", default=True, help="also run full attention")
@click.option("--landmarks", default=17, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
@guarded
def attn_bench(height, width, channels, window, run_full, landmarks, seed, as_json):
    """Benchmark full vs. windowed attention: MAC counts and wall time."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(height, width, channels))
    y = rng.normal(size=(height, width, channels))
    x_lm = _bench_landmarks(landmarks, width, height)
    y_lm = _bench_landmarks(landmarks, width, height)
    params = attention.AttentionParams.random(channels, 2 * landmarks, seed=seed)

    report = {
        "height": height, "width": width, "channels": channels,
        "embed": 2 * landmarks, "window": window,
    }

    reset_macs()
    t0 = time.perf_counter()
    sow_attention(x, y, x_lm, y_lm, window, params)
    sow_time = time.perf_counter() - t0
    sow_counted = macs()
    sow_formula = attention_cost(height, width, channels, 2 * landmarks, window)
    report["sow"] = {
        "score_macs": sow_counted["score"],
        "value_macs": sow_counted["value"],
        "formula_score_macs": sow_formula.score_macs,
        "formula_value_macs": sow_formula.value_macs,
        "wall_time_s": sow_time,
    }

    if run_full:
        reset_macs()
        t0 = time.perf_counter()
        cross_attention(x, y, x_lm, y_lm, params)
        full_time = time.perf_counter() - t0
        full_counted = macs()
        full_formula = attention_cost(height, width, channels, 2 * landmarks, None)
        report["full"] = {
            "score_macs": full_counted["score"],
            "value_macs": full_counted["value"],
            "formula_score_macs": full_formula.score_macs,
            "formula_value_macs": full_formula.value_macs,
            "wall_time_s": full_time,
        }
        report["score_ratio"] = full_counted["score"] / sow_counted["score"]
        report["wall_time_ratio"] = full_time / sow_time

    if as_json:
        click.echo(json.dumps(report, indent=1, sort_keys=True))
        return
    click.echo(f"{'variant':8} {'score MACs':>16} {'value MACs':>16} {'wall time':>12}")
    click.echo(
        f"{'sow':8} {report['sow']['score_macs']:>16d} "
        f"{report['sow']['value_macs']:>16d} {sow_time:>11.4f}s"
    )
    if run_full:
        click.echo(
            f"{'full':8} {report['full']['score_macs']:>16d} "
            f"{report['full']['value_macs']:>16d} {full_time:>11.4f}s"
        )
        click.echo(f"score-cost ratio full/sow: {report['score_ratio']:.2f}")
        click.echo(f"wall-time  ratio full/sow: {report['wall_time_ratio']:.2f}")


def _parse_named_paths(values):
    out = {}
    for item in values:
        if "=" not in item:
            raise click.BadParameter(f"expected id=path, got {item!r}")
        key, path = item.split("=", 1)
        out[key] = path
    return out


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path())
@click.option("--src", required=True, type=click.Path())
@click.option("--src-landmarks", required=True, type=click.Path())
@click.option("--ref", "refs", multiple=True, help="reference as id=image.png")
@click.option("--ref-landmarks", "ref_lms", multiple=True, help="id=landmarks.json")
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, type=click.Path())
@guarded
def edit(spec_path, src, src_landmarks, refs, ref_lms, seed, out):
    """Run the toy generator with a locally edited makeup feature map."""
    with open(spec_path) as fh:
        raw = json.load(fh)
    ref_paths = _parse_named_paths(refs)
    ref_lm_paths = _parse_named_paths(ref_lms)

    x_img = load_image(src)
    res = x_img.shape[0]
    cfg = GeneratorConfig(input_res=res, seed=seed)
    weights = init_generator_weights(cfg)
    x_lm = load_landmarks(src_landmarks, res, res)

    x_high, x_low = faenc_forward(to_unit_range(x_img), cfg, weights)
    gamma_x_high, gamma_x_low = mtm_forward(
        x_high, x_low, x_high, x_low, x_lm, x_lm, cfg, weights
    )

    entries_high, entries_low = [], []
    gammas_high, gammas_low = [], []
    gamma_cache = {}
    for entry in raw.get("entries", []):
        ref_id = entry["reference"]
        if ref_id not in ref_paths or ref_id not in ref_lm_paths:
            _fail(f"reference {ref_id!r} not supplied via --ref/--ref-landmarks")
        if ref_id not in gamma_cache:
            y_img = load_image(ref_paths[ref_id])
            y_lm = load_landmarks(ref_lm_paths[ref_id], res, res)
            y_high, y_low = faenc_forward(to_unit_range(y_img), cfg, weights)
            gamma_cache[ref_id] = mtm_forward(
                x_high, x_low, y_high, y_low, x_lm, y_lm, cfg, weights
            )
        g_high, g_low = gamma_cache[ref_id]
        mask = load_mask(entry["mask"])
        shade = float(entry["shade"])
        entries_high.append(
            EditEntry(downsample_mask(mask, cfg.high_res, cfg.high_res), shade, ref_id)
        )
        entries_low.append(
            EditEntry(downsample_mask(mask, cfg.low_res, cfg.low_res), shade, ref_id)
        )
        gammas_high.append(g_high)
        gammas_low.append(g_low)

    fused_high = local_edit(EditSpec(entries_high), gammas_high, gamma_x_high)
    fused_low = local_edit(EditSpec(entries_low), gammas_low, gamma_x_low)
    result = madec_forward(x_high, x_low, fused_high, fused_low, cfg, weights)
    save_image(out, from_unit_range(result))


@main.command(name="gradcheck")
@click.option("--kernel", required=True)
@click.option("--tol", default=None, type=float)
@guarded
def gradcheck_cmd(kernel, tol):
    """Run the registered gradient checks for one kernel."""
    reports = run_suite(kernel, tol)
    ok = True
    for label, report in reports:
        status = "pass" if report.passed else "FAIL"
        click.echo(
            f"{label}: max_abs={report.max_abs_err:.3e} "
            f"max_rel={report.max_rel_err:.3e} entries={report.num_entries_checked} {status}"
        )
        ok = ok and report.passed
    if not ok:
        _fail(f"gradient check failed for kernel {kernel!r}")


if __name__ == "__main__":
    main()
