"""Counting roots of random polynomials over p-adic fields and their finite extensions."""
from .padic import PadicNumber, PadicPolynomial
from .extension import ExtElement, ExtensionField

__all__ = ["PadicNumber", "PadicPolynomial", "ExtElement", "ExtensionField"]
