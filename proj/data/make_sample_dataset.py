"""Regenerates sample_network.json.

Round-trip times are estimated from great-circle distance
(1.25 ms per 100 km of distance plus 3 ms, with up to 3% per-direction
jitter). Hash shares are synthetic, with most of the total placed in
North America and Europe. Every node opens three links to random peers;
links are usable in both directions.
"""

import json
import math
import random

CITIES = [
    ("Amsterdam", 52.37, 4.90, 0.08),
    ("Atlanta", 33.75, -84.39, 0.04),
    ("Shanghai", 31.23, 121.47, 0.06),
    ("Tokyo", 35.68, 139.69, 0.04),
    ("Frankfurt", 50.11, 8.68, 0.12),
    ("London", 51.51, -0.13, 0.06),
    ("Paris", 48.86, 2.35, 0.03),
    ("Stockholm", 59.33, 18.07, 0.02),
    ("Moscow", 55.76, 37.62, 0.04),
    ("New York", 40.71, -74.01, 0.07),
    ("Chicago", 41.88, -87.63, 0.06),
    ("Dallas", 32.78, -96.80, 0.05),
    ("San Jose", 37.34, -121.89, 0.08),
    ("Seattle", 47.61, -122.33, 0.03),
    ("Toronto", 43.65, -79.38, 0.02),
    ("Singapore", 1.35, 103.82, 0.04),
    ("Hong Kong", 22.32, 114.17, 0.06),
    ("Seoul", 37.57, 126.98, 0.03),
    ("Beijing", 39.90, 116.41, 0.05),
    ("Sydney", -33.87, 151.21, 0.02),
]


def great_circle_km(a, b):
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def main():
    rng = random.Random(7)
    n = len(CITIES)
    latency = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = great_circle_km(CITIES[i][1:3], CITIES[j][1:3])
            base = 1.25 * d / 100.0 + 3.0
            latency[i][j] = round(base * (1.0 + rng.uniform(-0.03, 0.03)), 1)

    links = set()
    degree = [0] * n
    for u in range(n):
        opened = 0
        while opened < 3:
            w = rng.randrange(n)
            if w == u or (min(u, w), max(u, w)) in links or degree[w] >= 9:
                continue
            links.add((min(u, w), max(u, w)))
            degree[u] += 1
            degree[w] += 1
            opened += 1
    edges = sorted([[a, b] for a, b in links] + [[b, a] for a, b in links])

    doc = {
        "version": 1,
        "notes": ("Sample network. Latencies are estimated from great-circle distance "
                  "between the cities, not measured pings. Hash shares are synthetic. "
                  "Regenerate with make_sample_dataset.py."),
        "nodes": [{"label": c[0], "hash": c[3]} for c in CITIES],
        "latency_ms": latency,
        "fixed_edges": edges,
    }
    with open("sample_network.json", "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
