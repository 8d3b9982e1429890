"""Place-name geocoding with query caching.

Two providers: a bundled gazetteer for offline/deterministic operation (the
default, and the only one tests touch) and a Nominatim-compatible HTTP
provider for live deployments. Results are cached by normalized query so a
repeated lookup never hits the provider twice.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable

import httpx

from ..errors import GeocodeNoMatchError, GeocodeUnavailableError

GAZETTEER_PATH = Path(__file__).resolve().parent.parent / "fixtures" / "gazetteer.json"


def _normalize(query: str) -> str:
    return " ".join(query.lower().split())


class Geocoder:
    """Resolves free-text place names to (lat, lon)."""

    def __init__(
        self,
        provider: str = "builtin",
        gazetteer_path: Path | None = None,
        nominatim_url: str = "https://nominatim.openstreetmap.org/search",
        http_get: Callable[..., httpx.Response] | None = None,
    ):
        if provider not in ("builtin", "nominatim"):
            raise ValueError(f"unknown geocoding provider {provider!r}")
        self.provider = provider
        self.nominatim_url = nominatim_url
        self._http_get = http_get or httpx.get
        self._cache: dict[str, tuple[float, float]] = {}
        self.lookup_count = 0  # provider hits, excludes cache hits
        path = gazetteer_path or GAZETTEER_PATH
        self._gazetteer: dict[str, tuple[float, float]] = {}
        if path.exists():
            for name, coords in json.loads(path.read_text(encoding="utf-8")).items():
                self._gazetteer[_normalize(name)] = (coords[0], coords[1])

    def geocode(self, place: str) -> tuple[float, float]:
        """First match for the query as (lat, lon)."""
        key = _normalize(place)
        if not key:
            raise GeocodeNoMatchError("empty geocoding query")
        if key in self._cache:
            return self._cache[key]
        self.lookup_count += 1
        if self.provider == "builtin":
            result = self._from_gazetteer(key)
        else:
            result = self._from_nominatim(place)
        self._cache[key] = result
        return result

    def _from_gazetteer(self, key: str) -> tuple[float, float]:
        if key in self._gazetteer:
            return self._gazetteer[key]
        # containment fallback: "times square, manhattan" matches "times square"
        for name, coords in self._gazetteer.items():
            if name in key or key in name:
                return coords
        raise GeocodeNoMatchError(f"no gazetteer entry matches {key!r}")

    def _from_nominatim(self, place: str) -> tuple[float, float]:
        try:
            response = self._http_get(
                self.nominatim_url,
                params={"q": place, "format": "json", "limit": 1},
                headers={"User-Agent": "sumoflow/0.1"},
                timeout=20.0,
            )
            response.raise_for_status()
            matches = response.json()
        except Exception as exc:
            raise GeocodeUnavailableError(f"geocoding service unreachable: {exc}") from exc
        if not matches:
            raise GeocodeNoMatchError(f"no geocoding result for {place!r}")
        first = matches[0]
        return float(first["lat"]), float(first["lon"])
