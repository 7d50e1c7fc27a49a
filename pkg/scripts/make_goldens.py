"""Regenerate the fixture bundle and the committed golden files.

Run from the repository root:

    python3 scripts/make_goldens.py

Everything is seeded, so reruns are byte-stable. The CLI goldens are
produced by invoking the installed CLI exactly as the tests do.
"""

import json
import pathlib
import subprocess
import sys

import numpy as np

REPO = pathlib.Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"
GOLDEN = REPO / "tests" / "golden"


def make_edit_fixture():
    from makeupkit.io_utils import save_mask

    edit_dir = FIXTURES / "edit"
    edit_dir.mkdir(parents=True, exist_ok=True)
    mask = np.zeros((64, 64))
    mask[12:36, 8:56] = 1.0  # band across the eye region
    save_mask(edit_dir / "mask.png", mask)
    spec = {
        "entries": [
            {"mask": "fixtures/edit/mask.png", "shade": 0.6, "reference": "r1"}
        ]
    }
    (edit_dir / "spec.json").write_text(json.dumps(spec, indent=1))


def cli(*args):
    subprocess.run(
        [sys.executable, "-m", "makeupkit.cli", *args], cwd=REPO, check=True
    )


def main():
    from makeupkit.fixtures import generate_fixtures

    generate_fixtures(FIXTURES)
    make_edit_fixture()
    GOLDEN.mkdir(parents=True, exist_ok=True)

    p1 = "fixtures/pair1"
    cli(
        "warp",
        "--src-landmarks", f"{p1}/src_landmarks.json",
        "--ref-landmarks", f"{p1}/ref_landmarks.json",
        "--ref-image", f"{p1}/ref.png",
        "--out", str(GOLDEN / "warp_pair1.png"),
    )
    cli(
        "histmatch",
        "--src", f"{p1}/src.png", "--ref", f"{p1}/ref.png",
        "--masks-src", f"{p1}/src_masks", "--masks-ref", f"{p1}/ref_masks",
        "--out", str(GOLDEN / "histmatch_pair1.png"),
    )
    cli(
        "pgt",
        "--src", f"{p1}/src.png", "--ref", f"{p1}/ref.png",
        "--masks-src", f"{p1}/src_masks", "--masks-ref", f"{p1}/ref_masks",
        "--landmarks-src", f"{p1}/src_landmarks.json",
        "--landmarks-ref", f"{p1}/ref_landmarks.json",
        "--alphas", "0.5,0.5,0.5",
        "--out", str(GOLDEN / "pgt_pair1_a050.png"),
    )
    cli(
        "edit",
        "--spec", "fixtures/edit/spec.json",
        "--src", f"{p1}/src.png",
        "--src-landmarks", f"{p1}/src_landmarks.json",
        "--ref", f"r1={p1}/ref.png",
        "--ref-landmarks", f"r1={p1}/ref_landmarks.json",
        "--seed", "0",
        "--out", str(GOLDEN / "edit_pair1.png"),
    )
    print(f"goldens written to {GOLDEN}")


if __name__ == "__main__":
    main()
