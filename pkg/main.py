"""
Corpus bias auditor launcher.

Usage:
    python main.py synth --speakers 10 --utts 40 --snr-a 30 --snr-b 0 --seed 7
    python main.py audit --manifest synthetic_corpus/manifest.tsv
"""

import sys

from src.main import main

if __name__ == "__main__":
    sys.exit(main())
