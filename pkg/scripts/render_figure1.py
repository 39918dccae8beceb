"""Render the four p = 1 translating soliton panels (lambda = -0.5, 0, 1, 1.8) as SVG."""
import argparse
import math

from solitonlab.cli import FIGURE1_PANELS, figure1_panel, render_figure1


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", nargs="?", default="figure1")
    args = parser.parse_args()

    for path in render_figure1(args.out_dir):
        print(path)
    for panel in FIGURE1_PANELS:
        profile, _, meta = figure1_panel(panel)
        print(f"lambda={panel.lam:+.1f} d={panel.d:g} kappa in "
              f"[{profile.kappa.min():.6f}, {profile.kappa.max():.6f}] "
              f"turning/pi={meta['total_turning'] / math.pi:.6f}")


if __name__ == "__main__":
    main()
