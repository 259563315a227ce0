"""
iOCR Configuration
"""

from .config import IOCRConfig, RunConfig, VERSION
from .expected import ReferenceFigures

__all__ = ['IOCRConfig', 'RunConfig', 'ReferenceFigures', 'VERSION']
