"""Command-line front end: run configs, presets and result files."""
