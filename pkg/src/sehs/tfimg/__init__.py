"""Time-frequency imaging: CWT, synchrosqueezing, and image rasterization."""

from sehs.tfimg.transform import WsstConfig, cwt, wsst
from sehs.tfimg.image import TfImage, load_tf_image, save_tf_image, to_image

__all__ = [
    "TfImage",
    "WsstConfig",
    "cwt",
    "load_tf_image",
    "save_tf_image",
    "to_image",
    "wsst",
]
