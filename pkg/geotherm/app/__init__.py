"""Application package for geotherm."""
