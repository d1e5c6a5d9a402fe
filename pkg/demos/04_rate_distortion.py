# %% [markdown]
# # Rate-distortion sweep
#
# Base, soft and full decodes of every test image across the quality
# ladder.  The CSV is what you would plot.

# %%
import csv
import io
from pathlib import Path

import numpy as np

from agdl.bench import format_csv, run_rd

data = Path(__file__).resolve().parent.parent / "tests" / "data"
points, errors = run_rd(data, range(10, 101, 10))
text = format_csv(points)
print(text[:400])

# %% [markdown]
# Average gain of the refinement layer on critical pixels, per quality.

# %%
rows = list(csv.DictReader(io.StringIO(text)))
for q in range(10, 101, 10):
    soft = {r["image"]: float(r["crit_psnr"]) for r in rows if r["variant"] == "soft" and int(r["quality"]) == q}
    full = {r["image"]: float(r["crit_psnr"]) for r in rows if r["variant"] == "full" and int(r["quality"]) == q}
    gains = [full[k] - soft[k] for k in soft if not np.isnan(soft[k])]
    extra = np.mean([float(f["bpp"]) - float(s["bpp"]) for f, s in zip(
        [r for r in rows if r["variant"] == "full" and int(r["quality"]) == q],
        [r for r in rows if r["variant"] == "base" and int(r["quality"]) == q])])
    print(f"q={q:3d}  images with critical pixels {len(gains)}  "
          f"mean gain {np.mean(gains) if gains else float('nan'):5.2f} dB  extra bpp {extra:.4f}")
