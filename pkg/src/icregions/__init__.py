"""Rate regions of two-user interference channels with dependent auxiliaries."""

__version__ = "0.1.0"
