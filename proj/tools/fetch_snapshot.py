#!/usr/bin/env python3
"""Download the monthly rate panel and daily VIX closes from FRED into data/snapshot/.

rates.csv: THREEFY1..THREEFY10 (zero-coupon yields, percent), end-of-month values.
vix.csv:   VIXCLS daily closes; ratesvol aggregates them to monthly means.
VINTAGE:   first line records where the files came from.
"""

import argparse
import csv
import datetime as dt
import io
import pathlib
import sys
import urllib.request

FRED = "https://fred.stlouisfed.org/graph/fredgraph.csv"
RATE_IDS = [f"THREEFY{k}" for k in range(1, 11)]


def fetch(series, start, end, monthly_eop=False):
    url = f"{FRED}?id={series}&cosd={start}&coed={end}"
    if monthly_eop:
        url += "&fq=Monthly&fam=eop"
    with urllib.request.urlopen(url, timeout=60) as resp:
        rows = list(csv.reader(io.StringIO(resp.read().decode("utf-8"))))
    return {r[0]: r[1] for r in rows[1:] if len(r) >= 2}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "snapshot"))
    ap.add_argument("--start", default="1990-01-01")
    ap.add_argument("--end", default="2024-08-31")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    columns = {s: fetch(s, args.start, args.end, monthly_eop=True) for s in RATE_IDS}
    dates = sorted(set.intersection(*(set(c) for c in columns.values())))
    with open(out / "rates.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["DATE"] + RATE_IDS)
        for d in dates:
            w.writerow([d] + [columns[s][d] for s in RATE_IDS])

    vix = fetch("VIXCLS", args.start, args.end)
    with open(out / "vix.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["DATE", "VIXCLS"])
        for d in sorted(vix):
            w.writerow([d, vix[d]])

    (out / "VINTAGE").write_text(f"regenerated from FRED on {dt.date.today().isoformat()}\n")
    print(f"wrote {len(dates)} months of rates and {len(vix)} VIX days to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
