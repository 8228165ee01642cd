"""Great-circle distances."""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

EARTH_RADIUS_KM = 6371.0


def haversine_km(a: Optional[Sequence[float]], b: Optional[Sequence[float]]) -> Optional[float]:
    """Great-circle distance in km between two ``(lat, lon)`` points in degrees.

    Returns ``None`` when either location is missing.
    """
    if a is None or b is None:
        return None
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def distance_matrix(locations: Sequence[Optional[Sequence[float]]]) -> np.ndarray:
    """Pairwise haversine distances; rows/columns of missing locations are NaN."""
    n = len(locations)
    lat = np.full(n, np.nan)
    lon = np.full(n, np.nan)
    for i, loc in enumerate(locations):
        if loc is not None:
            lat[i], lon[i] = loc
    lat, lon = np.radians(lat), np.radians(lon)
    dlat = lat[:, None] - lat[None, :]
    dlon = lon[:, None] - lon[None, :]
    h = np.sin(dlat / 2) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2) ** 2
    d = 2 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))
    np.fill_diagonal(d, np.where(np.isnan(lat), np.nan, 0.0))
    return d


def offset_km(lat: float, lon: float, north_km: float, east_km: float) -> tuple[float, float]:
    """Shift a point by small north/east displacements (equirectangular approximation)."""
    km_per_deg = math.pi * EARTH_RADIUS_KM / 180.0
    new_lat = max(-90.0, min(90.0, lat + north_km / km_per_deg))
    coslat = max(math.cos(math.radians(new_lat)), 1e-6)
    new_lon = lon + east_km / (km_per_deg * coslat)
    new_lon = (new_lon + 180.0) % 360.0 - 180.0
    return new_lat, new_lon
