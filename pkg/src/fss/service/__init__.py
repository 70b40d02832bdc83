"""HTTP session service: treatment-filtered views, adjustments, sign-offs, export."""

from .config import ServiceConfig, load_service_config
from .manager import ProductContext, SessionManager, build_product_contexts
from .app import create_app

__all__ = [
    "ServiceConfig",
    "load_service_config",
    "ProductContext",
    "SessionManager",
    "build_product_contexts",
    "create_app",
]
