#!/usr/bin/env python3
"""Converts the GrabCut benchmark release into the PNG layout lapseg reads.

    prepare_grabcut.py --images data_GT --trimaps boundary_GT_lasso \
        --truth boundary_GT --out data/grabcut

Files are matched by stem. Trimaps and truth are written as 8-bit grayscale
with their values untouched (trimap: 0/64 background, 128 unknown, 255 object).
"""
import argparse
import sys
from pathlib import Path

from PIL import Image

SUFFIXES = {".jpg", ".jpeg", ".bmp", ".png", ".tif", ".tiff", ".ppm"}


def by_stem(folder):
    return {p.stem: p for p in sorted(Path(folder).iterdir()) if p.suffix.lower() in SUFFIXES}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--images", required=True)
    ap.add_argument("--trimaps", required=True)
    ap.add_argument("--truth", required=True)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    sources = {"images": by_stem(args.images), "trimaps": by_stem(args.trimaps),
               "truth": by_stem(args.truth)}
    stems = sorted(set.intersection(*(set(s) for s in sources.values())))
    missing = sorted(set.union(*(set(s) for s in sources.values())) - set(stems))
    if missing:
        print("skipping incomplete items: " + ", ".join(missing), file=sys.stderr)

    out = Path(args.out)
    for kind, files in sources.items():
        (out / kind).mkdir(parents=True, exist_ok=True)
        mode = "RGB" if kind == "images" else "L"
        for stem in stems:
            Image.open(files[stem]).convert(mode).save(out / kind / f"{stem}.png")
    print(f"wrote {len(stems)} items to {out}")


if __name__ == "__main__":
    main()
