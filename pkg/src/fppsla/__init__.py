"""FP-PSLA joint active and passive beamforming for fully connected BD-RIS."""

__version__ = "0.1.0"
