#!python
"""latent_witness.py

Runs One Latent Witness Pipeline (matrix, witness, detect-curve, heatmap, protocol or spin)

"""
import sys

from latent_witness.cli import main

if __name__ == "__main__":
    sys.exit(main())
