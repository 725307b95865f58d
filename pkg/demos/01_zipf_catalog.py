"""How content popularity shapes the achievable cache hit rate.

Requests follow a Zipf law: a handful of titles soak up most of the
demand, and the exponent gamma controls how steep that concentration
is. Caching the k most popular files therefore captures a popularity
mass that grows quickly at first and then flattens. This script prints
the captured mass for a few cache sizes and draws the whole curve for
two exponents: a measured-catalog value (0.56) and the classic 1.0.
"""
import argparse
from pathlib import Path

from scsim import build_catalog, hit_rate, top_k
from scsim.svgplot import render_line_chart


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-files", type=int, default=1000)
    parser.add_argument("--out", type=Path, default=Path(__file__).parent / "out")
    args = parser.parse_args()

    sizes = list(range(0, args.n_files + 1, 10)) or [0]
    marks = (1, 10, 31, 100, 316, args.n_files)
    series = []
    print(f"catalog of {args.n_files} files, popularity mass captured by top-k cache")
    for gamma in (0.56, 1.0):
        cat = build_catalog(args.n_files, gamma)
        curve = [hit_rate(cat, set(top_k(cat, k))) if k else 0.0 for k in sizes]
        series.append((f"gamma = {gamma}", [float(k) for k in sizes], curve))
        row = "  ".join(
            f"k={k}: {hit_rate(cat, set(top_k(cat, k))):.3f}" for k in marks
        )
        print(f"  gamma={gamma}: {row}")

    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / "zipf_hit_rate.svg"
    target.write_text(
        render_line_chart(
            series,
            title="cache hit rate versus cache size",
            x_label="cached files (most popular first)",
            y_label="hit rate",
        )
    )
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
