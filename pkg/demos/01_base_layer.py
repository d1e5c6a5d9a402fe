# %% [markdown]
# # The block-DCT base layer
#
# Encode one synthetic raster across the quality ladder and look at what the
# base layer costs and how much the POCS soft decoder recovers.

# %%
import numpy as np

from agdl.base_codec import decode_base, encode_base, scale_quant_table
from agdl.bench import psnr
from agdl.soft_decoder import bin_violation, soft_decode
from agdl.testimages import synthetic_corpus

img = synthetic_corpus()["shapes"]
print(img.shape, img.dtype)

# %% [markdown]
# The quantization table is the standard luminance table scaled by quality.

# %%
for q in (10, 50, 90):
    print(q, scale_quant_table(q)[0, :4])

# %%
print(" q   bytes    bpp   base dB  soft dB")
for q in range(10, 101, 10):
    payload, _ = encode_base(img, q)
    base, grid, table = decode_base(payload)
    soft = soft_decode(base, grid, table)
    bpp = 8 * len(payload.to_bytes()) / img.size
    print(f"{q:3d} {len(payload.to_bytes()):6d} {bpp:6.3f} {psnr(img, base):8.2f} {psnr(img, soft):8.2f}")

# %% [markdown]
# The soft decode never leaves the quantization bins it was given.

# %%
print("bin violation:", bin_violation(soft, grid, table))
