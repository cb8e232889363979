"""
Corpus Bias Auditor

Detects when two-group speech corpora are separable from recording
conditions rather than speech content, by comparing leave-one-speaker-out
classification on speech-only, non-speech-only and full recordings.

Author: Corpus Audit Team
Date: October 18, 2026
"""

__version__ = "1.0.0"
__author__ = "Corpus Audit Team"
__description__ = "Recording-environment bias auditor for two-group speech corpora"
