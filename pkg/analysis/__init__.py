"""Sweeps, dB conversion and transmissivity/bandwidth searches."""
