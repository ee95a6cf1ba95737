# Geometric independent set - core package
