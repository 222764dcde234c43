"""Figure rendering for bcucb experiment outputs (CSV + manifest files)."""
from .render import load_curves, load_manifest, render

__version__ = "0.1.0"

__all__ = ["load_curves", "load_manifest", "render"]
