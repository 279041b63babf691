#!/usr/bin/env python3
"""Regenerates data/: two small natural photographs with hand-placed scribbles.

Source photographs are the public-domain samples shipped with scikit-image.
Scribbles are drawn on a black canvas; red marks the object, blue the
surroundings.
"""
from pathlib import Path

from PIL import Image, ImageDraw
import skimage.data

OUT = Path(__file__).resolve().parent.parent / "data"
SIZE = (240, 160)
OBJECT = (255, 0, 0)
SURROUNDING = (0, 0, 255)

STROKES = {
    "chelsea": {
        OBJECT: [[(60, 40), (110, 45), (150, 60)], [(40, 120), (80, 135), (120, 140)],
                 [(100, 90), (130, 100)]],
        SURROUNDING: [[(218, 45), (222, 100), (225, 150)], [(200, 150), (235, 155)]],
    },
    "coffee": {
        OBJECT: [[(90, 40), (140, 40)], [(50, 110), (110, 125), (170, 115)],
                 [(80, 75), (120, 85)]],
        SURROUNDING: [[(8, 10), (50, 10)], [(215, 30), (225, 140)], [(8, 140), (18, 155)]],
    },
}


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name, strokes in STROKES.items():
        img = Image.fromarray(getattr(skimage.data, name)()).convert("RGB")
        img.resize(SIZE, Image.LANCZOS).save(OUT / f"{name}.png")
        canvas = Image.new("RGB", SIZE, (0, 0, 0))
        draw = ImageDraw.Draw(canvas)
        for colour, lines in strokes.items():
            for line in lines:
                draw.line(line, fill=colour, width=3)
        canvas.save(OUT / f"{name}-scribbles.png")


if __name__ == "__main__":
    main()
