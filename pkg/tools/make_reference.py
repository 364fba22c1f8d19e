"""Regenerate the packaged DICE-2016 reference solution artifact.

Usage: python tools/make_reference.py
Writes src/climstress/data/dice2016_reference.csv and prints the
headline diagnostics (the optimal control must first reach 1 in 2115).
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from climstress.params import ModelParams, load_parameter_file
from climstress.reference import compute_reference, write_reference


def main() -> None:
    raw = load_parameter_file()
    params = ModelParams.load()
    run, _problem = compute_reference(raw, params)
    tr = run.trajectory
    out = Path(__file__).resolve().parents[1] / "src/climstress/data/dice2016_reference.csv"
    write_reference(run, out)
    first_one = tr.years[np.argmax(tr.mu >= 0.999)]
    i2100 = int(np.searchsorted(tr.years, 2100))
    print(f"wrote {out}")
    print(f"welfare            {run.welfare:.6f}")
    print(f"iterations         {run.diagnostics['iterations']}")
    print(f"mu first reaches 1 {first_one:.0f}")
    print(f"T_AT(2100)         {tr.t_at[i2100]:.3f}")


if __name__ == "__main__":
    main()
