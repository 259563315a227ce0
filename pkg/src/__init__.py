"""
iOCR - OCR post-processing for tabulating human-readable ballots
"""

from config.config import VERSION

__version__ = VERSION
__author__ = "iOCR Team"
