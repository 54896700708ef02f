"""Pure spinor superfields, Tate resolutions and homotopy transfer, in exact arithmetic."""

__version__ = "0.1.0"
