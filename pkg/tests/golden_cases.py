"""CLI invocations whose reports are checked in under tests/golden.

Run ``python tests/golden_cases.py`` from the repository root to rewrite the
golden files after an intentional change to the report format.
"""

from __future__ import annotations

import io
import sys
from contextlib import redirect_stdout
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"

CASES: dict[str, tuple[list[str], int]] = {
    "validate_reflection_circle": (["validate", "instances/reflection_circle.json"], 0),
    "validate_nonassociative": (["validate", "tests/data/nonassociative.json"], 1),
    "validate_bad_face": (["validate", "tests/data/bad_face.json"], 2),
    "validate_not_a_complex": (["validate", "tests/data/not_a_complex.json"], 1),
    "validate_not_functorial": (["validate", "tests/data/not_functorial.json"], 1),
    "cohomology_point": (["cohomology", "instances/point.json"], 0),
    "cohomology_reflection_circle": (["cohomology", "instances/reflection_circle.json"], 0),
    "cohomology_antipodal_circle": (["cohomology", "instances/antipodal_circle.json", "--oracle"], 0),
    "cohomology_antipodal_circle_sign": (["cohomology", "instances/antipodal_circle_sign.json"], 0),
    "cohomology_rotation_sphere_machine": (["--format", "machine", "cohomology", "instances/rotation_sphere.json"], 0),
    "cohomology_s3_disk_oracle": (["cohomology", "instances/s3_disk.json", "--oracle", "--degrees", "0..2"], 0),
    "cohomology_s3_disk_sign": (["cohomology", "instances/s3_disk_sign.json", "--degrees", "1"], 0),
    "obstruction_zero": (["obstruction", "instances/antipodal_circle_sign.json", "--cochain", "zero"], 0),
    "obstruction_blocked": (["obstruction", "instances/antipodal_circle_sign.json", "--cochain", "generator"], 3),
    "obstruction_modified": (["obstruction", "instances/antipodal_circle_sign.json", "--cochain", "boundary"], 0),
    "obstruction_not_a_cocycle": (["obstruction", "instances/s3_disk.json", "--cochain", "bad"], 4),
    "obstruction_sphere_machine": (["--format", "machine", "obstruction", "instances/rotation_sphere.json", "--cochain", "top"], 3),
    "obstruction_unknown_cochain": (["obstruction", "instances/s3_disk.json", "--cochain", "nope"], 2),
    "difference_trivial": (["check-difference", "instances/antipodal_circle_sign.json", "--a1", "generator", "--a2", "generator", "--d", "d_zero"], 0),
    "difference_holds": (["check-difference", "instances/antipodal_circle_sign.json", "--a1", "boundary", "--a2", "zero", "--d", "d"], 0),
    "difference_fails": (["check-difference", "instances/antipodal_circle_sign.json", "--a1", "boundary", "--a2", "zero", "--d", "d_perturbed"], 5),
    "difference_degree_mismatch": (["check-difference", "instances/antipodal_circle_sign.json", "--a1", "zero", "--a2", "d", "--d", "d"], 1),
}


def render(argv: list[str]) -> tuple[str, int]:
    from eqobstruct.cli import main

    out = io.StringIO()
    with redirect_stdout(out):
        code = main([a if not a.endswith(".json") else str(ROOT / a) for a in argv])
    return out.getvalue(), code


def golden_path(name: str) -> Path:
    return GOLDEN / f"{name}.txt"


if __name__ == "__main__":
    sys.path.insert(0, str(ROOT / "src"))
    GOLDEN.mkdir(exist_ok=True)
    for name, (argv, _) in CASES.items():
        text, _ = render(argv)
        golden_path(name).write_text(text)
        print(f"wrote {golden_path(name).relative_to(ROOT)}")
