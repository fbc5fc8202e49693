#!/usr/bin/env python3
"""Regenerates the synthetic sample inputs in sample_data/.

The numbers are invented. They only need the right shape: 42 countries with
energy driven mostly by GDP, four scenario pathways out to 2060, and a slowly
declining share of world energy for the ratio series.

    python3 tools/generate_sample_data.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np

SEED = 20240607
N_COUNTRIES = 42
HIST_YEARS = range(1990, 2021)
SCEN_YEARS = range(2021, 2061)
RATIO_YEARS = range(1996, 2021)
SSPS = ["SSP126", "SSP245", "SSP370", "SSP585"]

DRIVERS = [
    "gdp_usd2015", "population", "urban_population", "urbanization", "temperature_k",
    "precipitation_mm", "co2_ppm", "ch4_ppb", "aerosol_aod550", "water_vapor_kgm2",
]

# Yearly growth of GDP and population, and end-of-2060 CO2 / CH4 levels.
PATHWAYS = {
    "SSP126": dict(gdp=0.026, pop=0.0035, co2=445.0, ch4=1600.0, warm=0.010),
    "SSP245": dict(gdp=0.024, pop=0.0050, co2=500.0, ch4=1950.0, warm=0.020),
    "SSP370": dict(gdp=0.018, pop=0.0080, co2=545.0, ch4=2500.0, warm=0.028),
    "SSP585": dict(gdp=0.032, pop=0.0030, co2=570.0, ch4=2400.0, warm=0.032),
}


def energy_ej(gdp, pop, urb, temp, rng):
    # GDP carries nearly all of the signal; the rest are small corrections.
    t = gdp / 1e12
    e = 2.9 * t ** 0.92 + 0.6 * (pop / 1e8) * (0.6 + 0.4 * urb) + 0.02 * np.abs(temp - 288.0)
    return e * (1.0 + rng.normal(0.0, 0.015))


class Country:
    def __init__(self, i, rng):
        self.code = f"C{i + 1:02d}"
        self.gdp0 = np.exp(rng.uniform(np.log(4e10), np.log(9e12)))
        self.pop0 = np.exp(rng.uniform(np.log(4e6), np.log(6e8)))
        self.urb0 = rng.uniform(0.25, 0.75)
        self.gdp_growth = rng.uniform(0.008, 0.042)
        self.pop_growth = rng.uniform(-0.002, 0.022)
        self.temp = rng.uniform(272.0, 300.0)
        self.precip = rng.uniform(250.0, 2600.0)
        self.aod = rng.uniform(0.06, 0.45)
        self.vapor = rng.uniform(6.0, 48.0)

    def drivers(self, gdp, pop, urb, temp, co2, ch4, rng):
        urb = min(max(urb, 0.0), 0.98)
        pop = round(pop)
        return {
            "gdp_usd2015": gdp,
            "population": pop,
            "urban_population": float(np.floor(pop * urb)),
            "urbanization": urb,
            "temperature_k": temp + rng.normal(0.0, 0.25),
            "precipitation_mm": self.precip * (1.0 + rng.normal(0.0, 0.05)),
            "co2_ppm": co2 + rng.normal(0.0, 0.4),
            "ch4_ppb": ch4 + rng.normal(0.0, 3.0),
            "aerosol_aod550": max(0.01, self.aod * (1.0 + rng.normal(0.0, 0.05))),
            "water_vapor_kgm2": self.vapor * (1.0 + rng.normal(0.0, 0.03)),
        }


def fmt(v):
    if isinstance(v, float) and v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.6g}" if abs(v) < 1e6 else f"{v:.9g}"


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "sample_data"
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    countries = [Country(i, rng) for i in range(N_COUNTRIES)]

    panel_rows = []
    last = {}
    for c in countries:
        gdp, pop, urb = c.gdp0, c.pop0, c.urb0
        for year in HIST_YEARS:
            k = year - HIST_YEARS.start
            co2 = 354.0 + 1.95 * k + 0.012 * k * k
            ch4 = 1715.0 + 5.3 * k
            temp = c.temp + 0.02 * k
            d = c.drivers(gdp, pop, urb, temp, co2, ch4, rng)
            e = energy_ej(d["gdp_usd2015"], d["population"], d["urbanization"], d["temperature_k"], rng)
            panel_rows.append([c.code, year] + [d[n] for n in DRIVERS] + [e])
            last[c.code] = (gdp, pop, urb, temp, co2, ch4)
            gdp *= 1.0 + c.gdp_growth + rng.normal(0.0, 0.012)
            pop *= 1.0 + c.pop_growth
            urb += 0.004

    with open(out / "panel.csv", "w", newline="\n") as f:
        f.write(",".join(["country", "year"] + DRIVERS + ["energy_ej"]) + "\n")
        for r in panel_rows:
            f.write(",".join([r[0], str(r[1])] + [fmt(float(v)) for v in r[2:]]) + "\n")

    with open(out / "scenario.csv", "w", newline="\n") as f:
        f.write(",".join(["ssp", "country", "year"] + DRIVERS) + "\n")
        for ssp in SSPS:
            p = PATHWAYS[ssp]
            for c in countries:
                gdp, pop, urb, temp, co2_0, ch4_0 = last[c.code]
                # Countries keep part of their historical growth differential.
                g = p["gdp"] + 0.4 * (c.gdp_growth - 0.03)
                for year in SCEN_YEARS:
                    k = year - 2020
                    frac = k / 40.0
                    gdp_y = gdp * (1.0 + g) ** k
                    pop_y = pop * (1.0 + p["pop"] + 0.3 * (c.pop_growth - 0.01)) ** k
                    co2 = co2_0 + (p["co2"] - co2_0) * frac
                    ch4 = ch4_0 + (p["ch4"] - ch4_0) * frac
                    d = c.drivers(gdp_y, pop_y, urb + 0.003 * k, temp + p["warm"] * k, co2, ch4, rng)
                    f.write(",".join([ssp, c.code, str(year)] + [fmt(float(d[n])) for n in DRIVERS]) + "\n")

    # Random walk pinned to 0.800 in 1996 and 0.774 in 2020, so a drift
    # forecast runs from about 0.773 in 2021 to 0.731 in 2060.
    n = len(RATIO_YEARS)
    walk = np.concatenate([[0.0], np.cumsum(rng.normal(0.0, 0.0015, n - 1))])
    walk -= walk[-1] * np.arange(n) / (n - 1)
    ratio = 0.800 + (0.774 - 0.800) * np.arange(n) / (n - 1) + walk
    with open(out / "ratio.csv", "w", newline="\n") as f:
        f.write("year,ratio\n")
        for year, r in zip(RATIO_YEARS, ratio):
            f.write(f"{year},{r:.6f}\n")

if __name__ == "__main__":
    main()
