"""Daily traffic shape and what it means for vehicles per cell.

Vehicle density follows a two-peak rush profile with a deep overnight
floor. Populations are drawn with exponential headways, so the number
of vehicles inside one 1 km cell is Poisson-like with mean
2 * density * cell_length (both directions). The script samples real
spawns at a few times of day and plots the multiplier curve.
"""
import argparse
from pathlib import Path

import numpy as np

from scsim import Highway, TrafficProfile, build_catalog, spawn_vehicles, traffic_multiplier
from scsim.svgplot import render_line_chart


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", type=Path, default=Path(__file__).parent / "out")
    args = parser.parse_args()

    profile = TrafficProfile()
    highway = Highway(n_stations=10, cell_length=1000.0)
    catalog = build_catalog(1000, 1.0)
    rng = np.random.default_rng(args.seed)

    print("hour  multiplier  spawned vehicles (10 km ring, both directions)")
    for hour in (3, 6, 8, 12, 18, 23):
        mult = traffic_multiplier(profile, hour * 3600.0)
        density = profile.base_density * mult
        counts = [
            spawn_vehicles(density, highway, catalog, rng).n for _ in range(5)
        ]
        print(f"{hour:4d}  {mult:10.4f}  {counts}")

    hours = [h / 4.0 for h in range(0, 97)]
    curve = [traffic_multiplier(profile, h * 3600.0) for h in hours]
    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / "traffic_profile.svg"
    target.write_text(
        render_line_chart(
            [("demand multiplier", hours, curve)],
            title="two-peak daily demand profile",
            x_label="hour of day",
            y_label="fraction of rush-hour density",
        )
    )
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
