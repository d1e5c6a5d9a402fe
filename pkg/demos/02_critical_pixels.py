# %% [markdown]
# # Finding critical pixels without side information
#
# Edges, saliency and soft-decoder activity are all computed from the
# decoded base layer, so the decoder finds the same pixels as the encoder.

# %%
from pathlib import Path

import numpy as np

from agdl.base_codec import decode_base, encode_base
from agdl.critical_mask import MaskParams, detect
from agdl.pgm import read_pgm, write_pgm
from agdl.soft_decoder import soft_decode

img = read_pgm(Path(__file__).resolve().parent.parent / "tests" / "data" / "camera.pgm")
base, grid, table = decode_base(encode_base(img, 20)[0])
soft = soft_decode(base, grid, table)

# %%
det = detect(base, soft, MaskParams())
for label, m in [("edges", det.edges), ("roi", det.roi), ("error proxy", det.error),
                 ("candidates", det.candidates)]:
    print(f"{label:12s} {int(m.sum()):6d} px")
print("critical    ", len(det.critical), "px (budget", MaskParams().budget(*img.shape[::-1]), ")")
print("first five  ", det.critical.coords[:5])

# %% [markdown]
# Save the masks next to this script for a look.

# %%
out = Path("demo_output")
out.mkdir(exist_ok=True)
write_pgm(out / "edges.pgm", det.edges.astype(np.uint8) * 255)
write_pgm(out / "roi.pgm", det.roi.astype(np.uint8) * 255)
write_pgm(out / "critical.pgm", det.critical.mask(img.shape).astype(np.uint8) * 255)

# %% [markdown]
# Running the detector again from the same base layer gives the same list.

# %%
again = detect(base.copy(), soft_decode(base, grid, table)).critical
print("identical:", again.coords == det.critical.coords)
