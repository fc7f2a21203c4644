"""Decision problems solved with the moment bounds."""
