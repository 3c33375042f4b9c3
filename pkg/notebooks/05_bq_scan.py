# %% [markdown]
# # Where does the Bowditch test pass?
#
# Take x = y = t and choose z so that mu = 0, then vary t over a window of the
# complex plane.  Each pixel is satisfied (white), violated (dark, shaded by the
# depth of the witness) or inconclusive within the budget (gray).  The satisfied
# pixels approximate the quasi-Fuchsian part of the diagonal slice.

# %%
import tempfile
from pathlib import Path

from markoff_mcshane.scan import ScanConfig, run_scan

cfg = ScanConfig(mode="vary_xy_diagonal", fixed_values={"mu": 0}, center=0j, width=8.0, height=8.0,
                 resolution=(64, 64))
result = run_scan(cfg, workers=4)
print(result.counts())

# %%
# coarse text rendering: every 2nd column, every 4th row
marks = {"satisfied": " ", "violated": "#", "inconclusive": ".", "undefined": "?"}
for j in range(0, 64, 4):
    print("".join(marks[result.grid[j][i].status] for i in range(0, 64, 2)))

# %%
out = Path(tempfile.mkdtemp()) / "diagonal.pgm"
out.write_bytes(result.pgm_bytes())
print("wrote", out)
