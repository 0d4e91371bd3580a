"""Runs a small pipeline through the CLI and validates the Scene with jsonschema."""

import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, schema_path, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)

    def run(*args: str) -> None:
        subprocess.run([cli, *args], cwd=work, check=True, stdout=subprocess.DEVNULL)

    run("fixture", "--out-dir", ".", "--rings", "16", "--streamlines", "600", "--samples", "30")
    for side, name in (("left", "lh"), ("right", "rh")):
        run("param", "--mesh", f"{name}.json", "--hemisphere", side, "--remove-region", "0",
            "--out", f"{name}.disk.json", "--mesh-out", f"{name}.mesh.json")
    meshes = ["--left-mesh", "lh.mesh.json", "--right-mesh", "rh.mesh.json"]
    disks = ["--left-disk", "lh.disk.json", "--right-disk", "rh.disk.json"]
    run("sphere", "--left", "lh.disk.json", "--right", "rh.disk.json", *meshes, "--scale", "2", "--out", "sphere.json")
    run("cluster", "--streamlines", "streamlines.trks", "--out", "clusters.json")
    run("connect", "--clusters", "clusters.json", "--streamlines", "streamlines.trks", *meshes, *disks,
        "--sphere", "sphere.json", "--out", "bundles.json", "--graph-out", "graph.json")
    run("overlay", *meshes, "--channel", "myelin", "--tsf", "series.tsf", "--seed-vertex", "0", "--out", "overlays.json")
    run("export", *meshes, *disks, "--sphere", "sphere.json", "--bundles", "bundles.json", "--graph", "graph.json",
        "--overlays", "overlays.json", "--out", "scene.json")

    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    scene = json.loads((work / "scene.json").read_text())
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(scene), key=lambda e: list(e.path))
    for e in errors[:10]:
        print(f"{list(e.path)}: {e.message}")
    if errors:
        return 1
    # A Scene without optional parts must validate too.
    run("export", *meshes, "--out", "bare.json")
    bare = json.loads((work / "bare.json").read_text())
    jsonschema.validate(bare, schema, cls=jsonschema.Draft202012Validator)
    print(f"scene with {scene['vertex_count']} vertices and {len(scene['bundles'])} bundles validates")
    return 0


if __name__ == "__main__":
    sys.exit(main())
