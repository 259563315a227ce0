"""
iOCR CLI Module
"""
