"""
smartem - Simulate and plan mmWave deployments assisted by Smart-EM nodes.

Supports five node classes:
- Donor gNB
- IAB node
- Smart Repeater
- RIS
- Smart Skin
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("smartem")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.1.0"
