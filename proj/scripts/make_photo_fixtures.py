"""Regenerate the 224x224 natural-photo fixtures under tests/data/photos.

Sources are public-domain / CC0 sample images bundled with scikit-image.
"""
import pathlib

import numpy as np
from skimage import color, data, io, transform

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "photos"

SOURCES = {
    "astronaut": data.astronaut,
    "coffee": data.coffee,
    "chelsea": data.chelsea,
    "rocket": data.rocket,
    "hubble": data.hubble_deep_field,
    "camera": data.camera,
}


def center_square(img):
    h, w = img.shape[:2]
    side = min(h, w)
    top, left = (h - side) // 2, (w - side) // 2
    return img[top:top + side, left:left + side]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, loader in SOURCES.items():
        img = loader()
        if img.ndim == 2:
            img = color.gray2rgb(img)
        img = center_square(img[..., :3])
        small = transform.resize(img, (224, 224), anti_aliasing=True)
        io.imsave(OUT / f"{name}.png", (np.clip(small, 0, 1) * 255 + 0.5).astype(np.uint8),
                  check_contrast=False)


if __name__ == "__main__":
    main()
