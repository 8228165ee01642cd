"""Analysis toolkit for attributed, geolocated research-collaboration networks."""
from .model import Edge, Layer, Network, Researcher, Roster
from .errors import CollabnetError

__version__ = "0.1.0"

__all__ = ["Edge", "Layer", "Network", "Researcher", "Roster", "CollabnetError", "__version__"]
