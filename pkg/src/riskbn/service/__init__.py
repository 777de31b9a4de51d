"""HTTP service exposing scenario assessment and interactive what-if."""

from riskbn.service.app import create_app

__all__ = ["create_app"]
