"""Time-to-transit visual navigation: simulator, controllers, stability tools."""

__version__ = "0.1.0"
