#!/usr/bin/env python3
"""
Wave Packet Lab Demo
Builds the example profiles, decomposes them into wave packets and
measures ||Ef||_{L^p(B_R)} against the trivial bound.
"""
import sys
import os
import logging

# Add the src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from exponent_ops.polytope import classify, named_vertices, tight_constraints
from harmonic_core.norms import BallNormIntegrator
from lab_harness.inequalities import trivial_exponent
from wave_packets.decomposition import WavePacketDecomposer
from wave_packets.families import build_family, largest_admissible_n


def main():
    """Run the wave packet lab demo"""
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    logger = logging.getLogger(__name__)

    print("🚀 Wave Packet Lab Demo")
    print("=" * 50)

    R = 1024.0
    N = largest_admissible_n(R)
    decomposer = WavePacketDecomposer()
    integrator = BallNormIntegrator()

    print(f"\n1. Example profiles at R={R:g} (N={N}):")
    print("-" * 30)
    for family in ("f0", "f1", "many", "bundle", "star"):
        f = build_family(family, R, N=N if family in ("bundle", "star") else None)
        decomp = decomposer.decompose(f, R)
        norms = integrator.integrate(f, R, [4.0, 6.0]).norms
        trivial = norms[6.0] / (R ** trivial_exponent(6.0) * f.l2_norm())
        print(f"   {f.label:24} K={decomp.packet_count:6d}  S={decomp.S:.3e}  "
              f"|Ef|_4={norms[4.0]:.3e}  trivial ratio (p=6)={trivial:.3f}")
        logger.debug(f"{f.label}: {decomp.summary()}")

    print("\n2. Exponent polytope vertices:")
    print("-" * 30)
    for name, point in named_vertices().items():
        print(f"   {name}: {point}  {classify(point).value:10} tight {tight_constraints(point)}")

    print("\n🎉 Demo completed successfully!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
