# Init for core module: jets, cosmology, adiabatic iteration, modes, sensitivity
