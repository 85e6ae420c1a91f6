# Test package for mcpy-lens
