"""Bundled experiment presets (YAML)."""
