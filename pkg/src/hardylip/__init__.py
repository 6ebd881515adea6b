"""Hardy spaces on Lipschitz graph domains: kernels, transforms, conformal maps and certificates."""
from __future__ import annotations

__version__ = "0.1.0"
