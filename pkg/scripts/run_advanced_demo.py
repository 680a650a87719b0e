#!/usr/bin/env python3
"""
Advanced Wave Packet Lab Demo
R-sweeps at the saturating vertices, a polynomial partition and a
decoupling battery, with SVG figures written to ./figures
"""
import sys
import os
import logging
from pathlib import Path

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from decoupling.arc_ensemble import decoupling_growth_fit
from exponent_ops.polytope import vertex
from lab_harness.config import load_config
from lab_harness.plots import plot_decoupling, plot_sweep
from lab_harness.sweep import run_sweep
from partitioning.partition import WeightedPoints, build_partition


def main():
    """Run the advanced lab demo"""
    logging.basicConfig(level=logging.INFO)
    config = load_config(seed=2026)
    out = Path("figures")
    out.mkdir(exist_ok=True)

    print("🚀 ADVANCED WAVE PACKET LAB DEMO")
    print("=" * 50)

    # 1. Sweeps that should saturate U and W
    print("\n1. R-sweeps:")
    for family, p, name in (("bundle", 4.0, "U"), ("star", 6.0, "W")):
        report = run_sweep(family, p, [256.0, 1024.0, 4096.0], "sqrt", vertex(name),
                           seed=config.seed, config=config)
        ratio = report.fits.get("ratio")
        slope = f"{ratio.slope:+.4f}" if ratio else "n/a"
        print(f"   {family:7} p={p:g} vs {name}: ratio slope {slope} "
              f"(predicted {report.predicted['ratio']:+.4f})")
        for note in report.notes():
            print(f"   ⚠️  {note}")
        plot_sweep(report, out / f"sweep_{family}.svg")

    # 2. Polynomial partition of a random cloud
    print("\n2. Polynomial partitioning:")
    rng = np.random.default_rng(config.seed)
    r = np.sqrt(rng.random(1000))
    a = 2 * np.pi * rng.random(1000)
    points = WeightedPoints.uniform(r * np.cos(a), r * np.sin(a))
    for D in (1, 2, 4):
        result = build_partition(points, D, seed=config.seed)
        print(f"   D={D}: {result.nonempty_cells} cells, imbalance {result.imbalance:.4f}, "
              f"degree {result.product_degree}")

    # 3. Decoupling battery
    print("\n3. Decoupling battery:")
    fit, frame = decoupling_growth_fit([1 / 16, 1 / 64, 1 / 256], 20, seed=config.seed)
    for delta, worst in sorted(fit.maxima.items(), reverse=True):
        print(f"   delta=1/{1 / delta:.0f}: max ratio {worst:.4f}")
    print(f"   growth slope in 1/delta: {fit.slope:+.4f}")
    plot_decoupling(frame, fit, out / "decoupling.svg")

    print(f"\n🎉 Advanced demo completed! Figures in {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
