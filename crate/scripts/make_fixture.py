#!/usr/bin/env python3
"""Generate the bundled synthetic flight fixture (BTS on-time column layout).

The fixture is small (~500 rows) and fully deterministic. It covers the
Florida registry on 2015-12-24 (three two-hour windows) plus a few rows on
other dates, cancelled/diverted rows, out-of-registry origins and malformed
rows, so the CLI and tests can run without the real dataset.

    python3 scripts/make_fixture.py > crates/airconf/data/fixture_flights.csv
"""
import csv
import random
import sys

HEADER = [
    "YEAR", "MONTH", "DAY", "DAY_OF_WEEK", "AIRLINE", "FLIGHT_NUMBER",
    "ORIGIN_AIRPORT", "DESTINATION_AIRPORT", "SCHEDULED_DEPARTURE",
    "DEPARTURE_DELAY", "DIVERTED", "CANCELLED",
]

# departures per hour in the fixture, and delay probability per window
TRAFFIC = {
    "MCO": (13, {"07": 0.20, "12": 0.45, "19": 0.40}),
    "MIA": (12, {"07": 0.40, "12": 0.50, "19": 0.45}),
    "FLL": (9, {"07": 0.15, "12": 0.40, "19": 0.35}),
    "TPA": (8, {"07": 0.10, "12": 0.35, "19": 0.30}),
    "PBI": (4, {"07": 0.35, "12": 0.35, "19": 0.20}),
    "RSW": (4, {"07": 0.10, "12": 0.40, "19": 0.20}),
    "JAX": (4, {"07": 0.10, "12": 0.15, "19": 0.35}),
    "SRQ": (1, {"07": 0.00, "12": 0.50, "19": 0.00}),
    "PNS": (2, {"07": 0.20, "12": 0.10, "19": 0.30}),
    "TLH": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "ECP": (1, {"07": 0.00, "12": 0.50, "19": 0.00}),
    "VPS": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "EYW": (2, {"07": 0.60, "12": 0.60, "19": 0.60}),
    "GNV": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "DAB": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "MLB": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "SFB": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "PIE": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    "PGD": (1, {"07": 0.00, "12": 0.00, "19": 0.00}),
    # FXE and VRB have no scheduled carrier departures
}
AIRLINES = ["AA", "DL", "UA", "WN", "B6", "NK", "F9"]
DESTS = ["ATL", "JFK", "ORD", "DFW", "BOS", "CLT", "DCA", "LGA", "EWR"]


def main() -> None:
    rng = random.Random(20151224)
    rows = []

    def row(y, m, d, origin, hhmm, delay, diverted=0, cancelled=0, dest=None):
        rows.append([
            y, m, d, 4, rng.choice(AIRLINES), rng.randint(100, 6999), origin,
            dest or rng.choice(DESTS), f"{hhmm:04d}",
            "" if delay is None else delay, diverted, cancelled,
        ])

    for start in ("07", "12", "19"):
        h0 = int(start)
        for origin, (per_hour, p_delay) in TRAFFIC.items():
            for _ in range(2 * per_hour):
                minute = rng.randrange(0, 120)
                hhmm = (h0 + minute // 60) * 100 + minute % 60
                if rng.random() < p_delay[start]:
                    delay = rng.randint(15, 140)
                else:
                    delay = rng.randint(-12, 14)
                row(2015, 12, 24, origin, hhmm, delay)

    # boundary delays at the default 15-minute threshold
    row(2015, 12, 24, "GNV", 1230, 15)
    row(2015, 12, 24, "GNV", 1231, 14)
    # window edges: 14:00 belongs to the next window
    row(2015, 12, 24, "TLH", 1400, 30)
    row(2015, 12, 24, "TLH", 1159, 30)
    # cancelled and diverted rows are dropped at parse time
    for origin in ("MCO", "MIA", "FLL", "TPA", "MCO", "MIA", "JAX", "PBI"):
        row(2015, 12, 24, origin, 1215, None, cancelled=1)
    for origin in ("MCO", "MIA", "FLL"):
        row(2015, 12, 24, origin, 1245, 20, diverted=1)
    # out-of-registry origins
    for _ in range(6):
        row(2015, 12, 24, rng.choice(DESTS), 1300, rng.randint(-5, 60), dest="MCO")
    # other dates
    for origin in ("MCO", "TPA", "FLL", "FXE", "MIA", "SFB"):
        for _ in range(8):
            row(2015, 7, 3, origin, 1200 + rng.randrange(0, 60), rng.randint(-5, 60))
    # malformed: missing delay on an operated flight, unknown time
    row(2015, 12, 24, "MCO", 1300, None)
    rows.append([2015, 12, 24, 4, "AA", 1, "MCO", "ATL", "25x0", 3, 0, 0])

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(HEADER)
    out.writerows(rows)


if __name__ == "__main__":
    main()
