"""Regenerate the bundled default portfolio specs.

The compositions approximate the shapes used for the published stress
illustrations: an annuity book of 10,000 policies with ages centred in
the mid-60s and payments shrinking with age, and an insurance book of
10,000 policies centred near age 40 with a hump-shaped sum-insured
profile. Only the qualitative shape matters for the shipped acceptance
checks (orderings and first-order deviations), not the exact digits.
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src/climstress/data"


def integer_counts(weights: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of weights to integers summing to total."""
    scaled = weights / weights.sum() * total
    counts = np.floor(scaled).astype(int)
    remainder = total - counts.sum()
    order = np.argsort(scaled - counts)[::-1]
    counts[order[:remainder]] += 1
    return counts


def write(kind: str, ages, counts, sums) -> None:
    lines = [f"# kind: {kind}", "age,count,sum_insured"]
    for a, c, s in zip(ages, counts, sums):
        if c > 0:
            lines.append(f"{a},{c},{s:.0f}")
    path = OUT / f"portfolio_{kind}.csv"
    path.write_text("\n".join(lines) + "\n")
    total = counts.sum()
    print(f"wrote {path} ({total} policies)")


def main() -> None:
    ages_a = np.arange(55, 91)
    w_a = np.exp(-0.5 * ((ages_a - 67) / 7.0) ** 2)
    counts_a = integer_counts(w_a, 10_000)
    sums_a = 60e3 - (ages_a - 55) * (40e3 / 35.0)  # annual payment per policy
    write("annuity", ages_a, counts_a, sums_a)

    ages_b = np.arange(25, 66)
    w_b = np.exp(-0.5 * ((ages_b - 42) / 9.0) ** 2)
    counts_b = integer_counts(w_b, 10_000)
    sums_b = np.where(
        ages_b <= 42,
        150e3 + (ages_b - 25) * (150e3 / 17.0),
        300e3 - (ages_b - 42) * (180e3 / 23.0),
    )
    write("insurance", ages_b, counts_b, sums_b)


if __name__ == "__main__":
    main()
