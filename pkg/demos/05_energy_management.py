"""Case study: sustainable power control versus the always-on baseline.

Both controllers see the same vehicles, the same caches, and the same
solar day; only energy discipline differs. The greedy baseline burns
full transmit power whenever any energy exists, so it wakes with the
sun, squanders the morning ramp, and dies at dusk. The sustainable
policy sleeps through the night, banks the ramp, and spends the stored
energy exactly when the evening rush needs it.
"""
import argparse
from pathlib import Path

from scsim import Scenario, compare_energy
from scsim.svgplot import render_line_chart


def offload_curve(report):
    hours = [em.epoch_start_s / 3600.0 for em in report.epochs]
    fractions = [
        em.scs_served / em.offered if em.offered else 0.0 for em in report.epochs
    ]
    return hours, fractions


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", type=Path, default=Path(__file__).parent / "out")
    args = parser.parse_args()

    result = compare_energy(Scenario(seed=args.seed))
    sus, greedy = result.sustainable, result.greedy

    print("daily totals (vehicle-seconds served by roadside stations)")
    print(f"  sustainable: {sus.scs_served:9d}  of {sus.offered} offered "
          f"({sus.normalized_offload:.3f})")
    print(f"  greedy:      {greedy.scs_served:9d}  of {greedy.offered} offered "
          f"({greedy.normalized_offload:.3f})")
    print(f"  capacity ratio: {result.capacity_ratio:.2f}")
    print(f"  greedy energy outage: {greedy.outage_energy:.0f} unit-seconds, "
          f"sustainable: {sus.outage_energy:.0f}")

    hours_s, curve_s = offload_curve(sus)
    hours_g, curve_g = offload_curve(greedy)
    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / "energy_management.svg"
    target.write_text(
        render_line_chart(
            [("sustainable", hours_s, curve_s), ("greedy baseline", hours_g, curve_g)],
            title="normalized offload through the day",
            x_label="hour of day",
            y_label="fraction of users served locally",
        )
    )
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
