#!/usr/bin/env python3
"""
Step-by-step walk through the hydrogen spectrum: kernel eigenvalues → levels → Balmer lines → Nystrom check
"""
import os
import sys
from dotenv import load_dotenv

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.config import load_run_config
from app.fock_solver import (
    BALMER_LIMIT,
    PhysicalConstants,
    balmer_ratios,
    kernel_eigenvalue,
    nystrom_cross_check,
    solve_levels,
)

load_dotenv()


def print_spectrum(n_max: int):
    """Print the spectrum up to n_max with the intermediate quantities."""
    config = load_run_config(n_max=n_max)

    print(f"⚛️  HYDROGEN SPECTRUM UP TO n = {config.n_max}")
    print("=" * 80)

    # Step 1: Constants
    print(f"\n📥 Step 1: Loading {config.constants_source} constants...")
    consts = PhysicalConstants.from_source(config.constants_source, config.reduced_mass)
    print(f"✅ alpha = {consts.alpha:.10e}, m c^2 = {consts.rest_energy_eV:.3f} eV "
          f"({'reduced' if consts.reduced_mass else 'electron'} mass)")

    # Step 2: Kernel eigenvalues by quadrature
    print(f"\n🧮 Step 2: Integrating the zonal kernel for n = 1..{config.n_max}...")
    for n in range(1, config.n_max + 1):
        lam = kernel_eigenvalue(n, config.grid)
        print(f"   n={n:2}  lambda_n = {lam:.12f}   n * lambda_n - 1 = {n * lam - 1.0:+.2e}")

    # Step 3: Energy levels
    print(f"\n📊 Step 3: Energy levels...")
    result = solve_levels(config.n_max, consts)
    for level in result.levels:
        bar = '█' * int(40 * level.E_n_eV / result.levels[0].E_n_eV)
        print(f"   n={level.n:2}  E = {level.E_n_eV:10.6f} eV  degeneracy {level.degeneracy:3}  {bar}")

    # Step 4: Balmer series
    if config.n_max >= 3:
        print(f"\n🌈 Step 4: Balmer lines relative to n=3 → 2 (limit {BALMER_LIMIT:.4f})...")
        for n, ratio in enumerate(balmer_ratios(result), start=3):
            print(f"   {n:2} → 2   {ratio:.6f}")
    else:
        print(f"\n⏭️  Step 4: Balmer series needs n_max >= 3")

    # Step 5: Nystrom cross-check
    print(f"\n🔍 Step 5: Nystrom cross-check on a {config.nystrom_grid}-node grid...")
    report = nystrom_cross_check(config.nystrom_grid, config.n_probe, config.nystrom_terms)
    print(f"✅ {report.points} nodes, |lambda_1 - 1| = {report.lambda_1_error:.2e}")
    for cluster in report.clusters:
        print(f"   n={cluster['n']}  {cluster['size']:2} eigenvalues, mean {cluster['mean']:.5f} "
              f"(target {1.0 / cluster['n']:.5f}, error {cluster['relative_error']:.1%})")

    print("\n" + "=" * 80)
    print(f"✅ E_1 = {result.levels[0].E_n_eV:.6f} eV")
    print("=" * 80)


def main():
    if len(sys.argv) > 2:
        print("Usage: python scripts/print_spectrum.py [N_MAX]")
        sys.exit(1)
    n_max = int(sys.argv[1]) if len(sys.argv) == 2 else 5
    print_spectrum(n_max)


if __name__ == "__main__":
    main()
